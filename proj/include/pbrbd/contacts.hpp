#pragma once

#include "pbrbd/bodies.hpp"
#include "pbrbd/collision.hpp"

namespace pbrbd {

enum class FrictionCombine { GeometricMean, Average, Min, Max };

double combine_friction(double a, double b, FrictionCombine mode);

struct ContactParams {
    /// Pre-solve normal speeds at or below this are treated as resting (e = 0).
    double restitution_cutoff = 2.0 * 9.81 / 600.0;
    FrictionCombine friction_combine = FrictionCombine::GeometricMean;
};

/// Velocity change requested at a contact, with the world-frame lever arms
/// it is applied through.
struct VelocityDelta {
    Vec3 dv;
    Vec3 r_a;
    Vec3 r_b;
};

/// Velocity of body point at world offset r from the center of mass.
Vec3 point_velocity(const RigidBody& body, const Vec3& r_world);

/// v_a + w_a x r_a - (v_b + w_b x r_b) at the contact's witness points.
Vec3 relative_contact_velocity(const Contact& c, const RigidBody& a, const RigidBody& b);

/// Instantaneous impulse p applied at world offset r: v += w p, w += I^-1 (r x p).
void apply_velocity_impulse(RigidBody& body, const Vec3& r_world, const Vec3& impulse);

/// Applies delta.dv as a relative-velocity change along its own direction,
/// splitting it with generalized inverse masses. Returns the impulse magnitude.
double apply_velocity_delta(const VelocityDelta& delta, RigidBody& a, RigidBody& b);

/// Rigid positional constraint C = depth along n. Accumulates lambda_normal.
/// Returns true when a correction was applied.
bool solve_contact_position(Contact& c, RigidBody& a, RigidBody& b);

/// Cancels tangential slip of the witness points since the previous pose when
/// the accumulated tangential multiplier stays within mu_s * lambda_normal.
/// Otherwise leaves the contact marked for dynamic friction.
bool solve_contact_static_friction(Contact& c, RigidBody& a, RigidBody& b, const ContactParams& params = {});

/// Reflects the relative normal velocity toward max(-e v~_n, 0), e = e_a e_b.
bool velocity_solve_restitution(const Contact& c, RigidBody& a, RigidBody& b, double h,
                                const ContactParams& params = {});

/// Reduces tangential relative speed by min(mu_d |lambda_n| / h, |v_t|).
bool velocity_solve_dynamic_friction(const Contact& c, RigidBody& a, RigidBody& b, double h,
                                     const ContactParams& params = {});

} // namespace pbrbd
