#include "pbrbd/contacts.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace pbrbd {

double combine_friction(double a, double b, FrictionCombine mode) {
    switch (mode) {
    case FrictionCombine::GeometricMean: return std::sqrt(a * b);
    case FrictionCombine::Average: return 0.5 * (a + b);
    case FrictionCombine::Min: return std::min(a, b);
    case FrictionCombine::Max: return std::max(a, b);
    }
    return std::sqrt(a * b);
}

Vec3 point_velocity(const RigidBody& body, const Vec3& r_world) {
    return body.velocity + cross(body.angular_velocity_world(), r_world);
}

namespace {

// World-space lever arms to the current surface witnesses.
std::pair<Vec3, Vec3> witness_arms(const Contact& c, const RigidBody& a, const RigidBody& b) {
    return {current_witness_a(c, a) - a.position, current_witness_b(c, b) - b.position};
}

} // namespace

Vec3 relative_contact_velocity(const Contact& c, const RigidBody& a, const RigidBody& b) {
    const auto [ra, rb] = witness_arms(c, a, b);
    return point_velocity(a, ra) - point_velocity(b, rb);
}

void apply_velocity_impulse(RigidBody& body, const Vec3& r_world, const Vec3& impulse) {
    if (body.is_static()) return;
    body.velocity += impulse * body.inverse_mass;
    if (body.is_particle()) return;
    const Vec3 torque_self = rotate_inverse(body.orientation, cross(r_world, impulse));
    body.angular_velocity_local += body.inverse_inertia_body * torque_self;
}

double apply_velocity_delta(const VelocityDelta& delta, RigidBody& a, RigidBody& b) {
    const double mag = length(delta.dv);
    if (mag == 0.0) return 0.0;
    const Vec3 dir = delta.dv / mag;
    const double w = generalized_inverse_mass_positional(a, rotate_inverse(a.orientation, delta.r_a), dir) +
                     generalized_inverse_mass_positional(b, rotate_inverse(b.orientation, delta.r_b), dir);
    if (w == 0.0) return 0.0;
    const Vec3 p = delta.dv / w;
    apply_velocity_impulse(a, delta.r_a, p);
    apply_velocity_impulse(b, delta.r_b, -p);
    return mag / w;
}

bool solve_contact_position(Contact& c, RigidBody& a, RigidBody& b) {
    const double depth = current_depth(c, a, b);
    if (depth <= 0.0) return false;
    const auto [ra, rb] = witness_arms(c, a, b);
    const Vec3 la = rotate_inverse(a.orientation, ra);
    const Vec3 lb = rotate_inverse(b.orientation, rb);
    const double w = generalized_inverse_mass_positional(a, la, c.normal) +
                     generalized_inverse_mass_positional(b, lb, c.normal);
    if (w == 0.0) return false;
    const double dlambda = depth / w;
    c.lambda_normal += dlambda;
    apply_positional_correction(a, la, c.normal * dlambda);
    apply_positional_correction(b, lb, c.normal * -dlambda);
    return true;
}

bool solve_contact_static_friction(Contact& c, RigidBody& a, RigidBody& b, const ContactParams& params) {
    c.static_friction_applied = false;
    if (c.lambda_normal <= 0.0) return false;
    const Vec3 pa = a.to_world(c.r_a_local);
    const Vec3 pb = b.to_world(c.r_b_local);
    const Vec3 pa_prev = a.prev_position + rotate(a.prev_orientation, c.r_a_local);
    const Vec3 pb_prev = b.prev_position + rotate(b.prev_orientation, c.r_b_local);
    const Vec3 dp = (pa - pa_prev) - (pb - pb_prev);
    const Vec3 dp_t = dp - c.normal * dot(dp, c.normal);
    const double slip = length(dp_t);
    const double mu_s = combine_friction(a.material.static_friction, b.material.static_friction,
                                         params.friction_combine);
    if (slip < 1e-15) {
        c.static_friction_applied = true;
        return false;
    }
    const Vec3 t = dp_t / slip;
    const double w = generalized_inverse_mass_positional(a, c.r_a_local, t) +
                     generalized_inverse_mass_positional(b, c.r_b_local, t);
    if (w == 0.0) return false;
    const double dlambda = slip / w;
    if (c.lambda_tangent + dlambda > mu_s * c.lambda_normal) return false;
    c.lambda_tangent += dlambda;
    c.static_friction_applied = true;
    apply_positional_correction(a, c.r_a_local, t * -dlambda);
    apply_positional_correction(b, c.r_b_local, t * dlambda);
    return true;
}

bool velocity_solve_restitution(const Contact& c, RigidBody& a, RigidBody& b, double, const ContactParams& params) {
    const auto [ra, rb] = witness_arms(c, a, b);
    const double vn = dot(point_velocity(a, ra) - point_velocity(b, rb), c.normal);
    const double vn_pre = c.pre_solve_normal_speed;
    double e = a.material.restitution * b.material.restitution;
    if (std::abs(vn_pre) <= params.restitution_cutoff) e = 0.0;
    const double target = std::max(-e * vn_pre, 0.0);
    const double change = target - vn;
    if (change == 0.0) return false;
    return apply_velocity_delta({c.normal * change, ra, rb}, a, b) > 0.0;
}

bool velocity_solve_dynamic_friction(const Contact& c, RigidBody& a, RigidBody& b, double h,
                                     const ContactParams& params) {
    const double mu_d = combine_friction(a.material.dynamic_friction, b.material.dynamic_friction,
                                         params.friction_combine);
    if (mu_d == 0.0) return false;
    const auto [ra, rb] = witness_arms(c, a, b);
    const Vec3 v = point_velocity(a, ra) - point_velocity(b, rb);
    const Vec3 vt = v - c.normal * dot(v, c.normal);
    const double speed = length(vt);
    if (speed == 0.0) return false;
    const double reduction = std::min(mu_d * std::abs(c.lambda_normal) / h, speed);
    return apply_velocity_delta({vt * (-reduction / speed), ra, rb}, a, b) > 0.0;
}

} // namespace pbrbd
