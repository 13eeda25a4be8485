#pragma once

#include <array>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "pbrbd/bodies.hpp"

namespace pbrbd {

struct ConstraintCommon {
    /// Inverse stiffness in m/N; 0 is rigid.
    double compliance = 0.0;
    /// Accumulated multiplier for the current substep.
    double lambda = 0.0;
};

struct Attachment {
    BodyId body = 0;
    Vec3 r_local;
};

enum class DistanceMode { Exact, MaxDistance };

struct DistanceConstraint {
    ConstraintCommon common;
    Attachment a;
    Attachment b;
    double rest_distance = 0.0;
    DistanceMode mode = DistanceMode::Exact;
};

/// Keeps a body-frame axis of each body aligned.
struct HingeConstraint {
    ConstraintCommon common;
    BodyId a = 0;
    BodyId b = 0;
    Vec3 axis_a_local{0.0, 0.0, 1.0};
    Vec3 axis_b_local{0.0, 0.0, 1.0};
    // stored for completeness, no solve term uses it
    std::optional<Vec3> secondary_axis;
};

/// Limits the angle between two body-frame axes to max_angle.
struct BallJointConstraint {
    ConstraintCommon common;
    BodyId a = 0;
    BodyId b = 0;
    Vec3 axis_a_local{0.0, 1.0, 0.0};
    Vec3 axis_b_local{0.0, 1.0, 0.0};
    double max_angle = 0.5;
};

/// Keeps the volume of the tetrahedron spanned by four particles.
struct VolumeConstraint {
    ConstraintCommon common;
    std::array<BodyId, 4> particles{};
    double rest_volume = 0.0;
};

/// Drags a body point along a per-frame sampled path, interpolated per substep.
struct AnchorConstraint {
    ConstraintCommon common;
    Attachment body;
    std::vector<Vec3> path;
};

using Constraint =
    std::variant<DistanceConstraint, HingeConstraint, BallJointConstraint, VolumeConstraint, AnchorConstraint>;

ConstraintCommon& common_of(Constraint& c);
const ConstraintCommon& common_of(const Constraint& c);

/// Bodies a constraint reads or writes (up to four).
struct BodyList {
    std::array<BodyId, 4> ids{};
    std::size_t count = 0;
    std::span<const BodyId> view() const { return {ids.data(), count}; }
};
BodyList bodies_of(const Constraint& c);

/// Multiplier increment (C - a/h^2 * lambda_acc) / (sum_w + a/h^2). With
/// lambda_acc = 0 this is C / (sum w_i |grad C_i|^2 + a/h^2). The caller moves
/// body i by -lambda * w_i * grad C_i. Returns nullopt when the denominator is 0
/// (every body static and the constraint rigid).
std::optional<double> xpbd_lambda(double error, double weighted_gradient_sum, double compliance, double h,
                                  double lambda_accumulated = 0.0);

struct GradientTerm {
    double inverse_mass;
    Vec3 gradient;
};
std::optional<double> xpbd_lambda(double error, std::span<const GradientTerm> terms, double compliance, double h,
                                  double lambda_accumulated = 0.0);

// Error functions with exact analytic gradients.

struct DistanceEval {
    double error = 0.0;
    /// d C / d p1 and d C / d p2.
    Vec3 grad_p1;
    Vec3 grad_p2;
    bool degenerate = false;
};
DistanceEval evaluate_distance(const Vec3& p1, const Vec3& p2, double rest, DistanceMode mode);

struct AngularEval {
    double error = 0.0;
    /// Unit correction axis (a1 x a2)/|a1 x a2|; rotating body a about it
    /// moves a1 toward a2.
    Vec3 axis;
    /// d C / d theta for a small rotation theta applied to body a and to body b.
    Vec3 grad_a;
    Vec3 grad_b;
    bool active = false;
};
/// error = |a1 x a2|.
AngularEval evaluate_hinge(const Vec3& a1_world, const Vec3& a2_world);
/// error = |a1 x a2| (sigma - max_angle), active only when sigma > max_angle.
AngularEval evaluate_ball_joint(const Vec3& a1_world, const Vec3& a2_world, double max_angle);

struct VolumeEval {
    /// 6 (V - V_rest)
    double error = 0.0;
    std::array<Vec3, 4> gradients;
};
double signed_tet_volume(const Vec3& x0, const Vec3& x1, const Vec3& x2, const Vec3& x3);
VolumeEval evaluate_volume(const std::array<Vec3, 4>& x, double rest_volume);

/// Linear interpolation of the path target for a substep: from sample
/// `frame` to sample `frame + 1` at fraction (substep + 1) / num_substeps.
/// Indices past the end clamp to the last sample.
Vec3 anchor_target(std::span<const Vec3> path, std::size_t frame, int substep, int num_substeps);

// Projection kernels. Each returns true when it moved anything.

bool solve_distance(DistanceConstraint& c, RigidBody& a, RigidBody& b, double h);
bool solve_hinge(HingeConstraint& c, RigidBody& a, RigidBody& b, double h);
bool solve_ball_joint(BallJointConstraint& c, RigidBody& a, RigidBody& b, double h);
bool solve_volume(VolumeConstraint& c, std::array<RigidBody*, 4> particles, double h);
bool solve_anchor(AnchorConstraint& c, RigidBody& body, const Vec3& target, double h);

struct ConstraintForce {
    Vec3 force;
    Vec3 torque;
};
/// lambda n / h^2, read as a force for positional constraints and a torque
/// for angular ones.
ConstraintForce constraint_force(double lambda, const Vec3& direction, double h, bool angular = false);

} // namespace pbrbd
