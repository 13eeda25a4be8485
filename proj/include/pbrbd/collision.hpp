#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <unordered_set>
#include <vector>

#include "pbrbd/bodies.hpp"

namespace pbrbd {

/// Unordered body pair, stored with a < b.
struct CandidatePair {
    BodyId a = 0;
    BodyId b = 0;

    static CandidatePair make(BodyId x, BodyId y) { return x < y ? CandidatePair{x, y} : CandidatePair{y, x}; }
    auto operator<=>(const CandidatePair&) const = default;
};

struct Contact {
    BodyId body_a = 0;
    BodyId body_b = 0;
    /// Midpoint between the two witness points.
    Vec3 point;
    double depth = 0.0;
    /// Unit normal pointing from b toward a; moving a along it separates the pair.
    Vec3 normal;
    /// Material witness points in each body's frame (used for slip).
    Vec3 r_a_local;
    Vec3 r_b_local;
    /// Core points (sphere center, capsule segment point, or the witness for
    /// flat shapes) and rounding radii; the current surface witness is the
    /// core offset by the radius along the normal.
    Vec3 core_a_local;
    Vec3 core_b_local;
    double radius_a = 0.0;
    double radius_b = 0.0;

    double lambda_normal = 0.0;
    double lambda_tangent = 0.0;
    bool static_friction_applied = false;
    /// Relative normal speed before this substep's position solve.
    double pre_solve_normal_speed = 0.0;
};

class UnsupportedPair : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Pairs that never produce contacts (e.g. bodies joined by a constraint).
class CollisionFilter {
public:
    void ignore(BodyId a, BodyId b) { ignored_.insert(key(a, b)); }
    bool allows(BodyId a, BodyId b) const { return !ignored_.contains(key(a, b)); }
    std::size_t size() const { return ignored_.size(); }

private:
    static std::uint64_t key(BodyId a, BodyId b) {
        const auto p = CandidatePair::make(a, b);
        return (static_cast<std::uint64_t>(p.a) << 32) | p.b;
    }
    std::unordered_set<std::uint64_t> ignored_;
};

struct Aabb {
    Vec3 min;
    Vec3 max;
    bool overlaps(const Aabb& o) const {
        return min.x <= o.max.x && o.min.x <= max.x && min.y <= o.max.y && o.min.y <= max.y &&
               min.z <= o.max.z && o.min.z <= max.z;
    }
};

struct BroadPhaseParams {
    /// Time window the pairs must cover (one frame).
    double dt = 1.0 / 60.0;
    double margin = 0.05;
    Vec3 gravity{0.0, -9.81, 0.0};
};

/// Bounding-sphere box of a bounded collider, grown by |v| dt + 0.5 |g| dt^2 + margin
/// (static bodies are not grown by motion terms).
Aabb swept_aabb(const RigidBody& body, const BroadPhaseParams& params);

/// True when the swept box reaches the half-space owned by `plane_body`.
bool aabb_reaches_half_space(const Aabb& box, const RigidBody& plane_body);

/// Whether two bodies are eligible to collide at all: both have colliders,
/// at least one is dynamic and the filter allows them.
bool may_collide(const RigidBody& a, const RigidBody& b, BodyId ia, BodyId ib, const CollisionFilter& filter);

/// Sweep-and-prune along the axis of largest AABB-center variance; half-spaces
/// are tested against every bounded box. Result is sorted.
std::vector<CandidatePair> broad_phase(std::span<const RigidBody> bodies, const BroadPhaseParams& params,
                                       const CollisionFilter& filter = {});

/// Contacts between two bodies with depth > -slop. Box/box and box/half-space
/// produce up to four points. Throws UnsupportedPair for half-space/half-space.
/// The result does not depend on argument order beyond swapping roles and
/// flipping the normal.
std::vector<Contact> narrow_phase(const RigidBody& a, BodyId ia, const RigidBody& b, BodyId ib, double slop);

inline std::vector<Contact> narrow_phase(std::span<const RigidBody> bodies, const CandidatePair& pair, double slop) {
    return narrow_phase(bodies[pair.a], pair.a, bodies[pair.b], pair.b, slop);
}

/// Surface witness points at the bodies' current poses, in world space.
Vec3 current_witness_a(const Contact& c, const RigidBody& a);
Vec3 current_witness_b(const Contact& c, const RigidBody& b);

/// Penetration of the contact at the bodies' current poses: (p_b - p_a) . n.
double current_depth(const Contact& c, const RigidBody& a, const RigidBody& b);

/// Point containment for a posed collider.
bool contains_point(const RigidBody& body, const Vec3& p_world);

} // namespace pbrbd
