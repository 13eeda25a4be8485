#include "pbrbd/constraints.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace pbrbd {

ConstraintCommon& common_of(Constraint& c) {
    return std::visit([](auto& k) -> ConstraintCommon& { return k.common; }, c);
}
const ConstraintCommon& common_of(const Constraint& c) {
    return std::visit([](const auto& k) -> const ConstraintCommon& { return k.common; }, c);
}

BodyList bodies_of(const Constraint& c) {
    BodyList out;
    auto add = [&out](BodyId id) {
        for (std::size_t i = 0; i < out.count; ++i)
            if (out.ids[i] == id) return;
        out.ids[out.count++] = id;
    };
    std::visit(
        [&](const auto& k) {
            using T = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<T, DistanceConstraint>) {
                add(k.a.body);
                add(k.b.body);
            } else if constexpr (std::is_same_v<T, HingeConstraint> || std::is_same_v<T, BallJointConstraint>) {
                add(k.a);
                add(k.b);
            } else if constexpr (std::is_same_v<T, VolumeConstraint>) {
                for (BodyId id : k.particles) add(id);
            } else {
                add(k.body.body);
            }
        },
        c);
    return out;
}

std::optional<double> xpbd_lambda(double error, double weighted_gradient_sum, double compliance, double h,
                                  double lambda_accumulated) {
    const double alpha = compliance / (h * h);
    const double denom = weighted_gradient_sum + alpha;
    if (denom == 0.0) return std::nullopt;
    return (error - alpha * lambda_accumulated) / denom;
}

std::optional<double> xpbd_lambda(double error, std::span<const GradientTerm> terms, double compliance, double h,
                                  double lambda_accumulated) {
    double sum = 0.0;
    for (const auto& t : terms) sum += t.inverse_mass * length_squared(t.gradient);
    return xpbd_lambda(error, sum, compliance, h, lambda_accumulated);
}

DistanceEval evaluate_distance(const Vec3& p1, const Vec3& p2, double rest, DistanceMode mode) {
    DistanceEval e;
    const Vec3 d = p2 - p1;
    const double len = length(d);
    if (len < 1e-12) {
        e.degenerate = true;
        return e;
    }
    const Vec3 n = d / len;
    e.error = len - rest;
    if (mode == DistanceMode::MaxDistance) e.error = std::max(0.0, e.error);
    e.grad_p1 = -n;
    e.grad_p2 = n;
    return e;
}

namespace {

AngularEval angular_eval(const Vec3& a1, const Vec3& a2, double max_angle, bool limit) {
    AngularEval e;
    const Vec3 c = cross(a1, a2);
    const double sin_s = length(c);
    const double cos_s = dot(a1, a2);
    const double sigma = std::atan2(sin_s, cos_s);
    if (!limit) {
        if (sin_s < 1e-12) return e;
        e.axis = c / sin_s;
        e.error = sin_s;
        // d|a1 x a2| / d theta_a = -(a1 . a2) n
        e.grad_a = e.axis * -cos_s;
        e.grad_b = e.axis * cos_s;
        e.active = true;
        return e;
    }
    if (sigma <= max_angle) return e;
    if (sin_s < 1e-12) {
        // anti-parallel: any perpendicular axis, angular excess as the error
        e.axis = any_perpendicular(a1);
        e.error = sigma - max_angle;
    } else {
        e.axis = c / sin_s;
        e.error = sin_s * (sigma - max_angle);
    }
    const double d_sigma = cos_s * (sigma - max_angle) + sin_s;
    e.grad_a = e.axis * -d_sigma;
    e.grad_b = e.axis * d_sigma;
    e.active = true;
    return e;
}

bool solve_angular(ConstraintCommon& common, const AngularEval& e, RigidBody& a, RigidBody& b, double h) {
    if (!e.active || e.error == 0.0) return false;
    const double w = generalized_inverse_mass_angular(a, e.axis) + generalized_inverse_mass_angular(b, e.axis);
    const auto lambda = xpbd_lambda(e.error, w, common.compliance, h, common.lambda);
    if (!lambda) return false;
    common.lambda += *lambda;
    apply_angular_correction(a, e.axis, *lambda, 1.0);
    apply_angular_correction(b, e.axis, *lambda, -1.0);
    return true;
}

} // namespace

AngularEval evaluate_hinge(const Vec3& a1_world, const Vec3& a2_world) {
    return angular_eval(a1_world, a2_world, 0.0, false);
}

AngularEval evaluate_ball_joint(const Vec3& a1_world, const Vec3& a2_world, double max_angle) {
    return angular_eval(a1_world, a2_world, max_angle, true);
}

double signed_tet_volume(const Vec3& x0, const Vec3& x1, const Vec3& x2, const Vec3& x3) {
    return dot(x1 - x0, cross(x2 - x0, x3 - x0)) / 6.0;
}

VolumeEval evaluate_volume(const std::array<Vec3, 4>& x, double rest_volume) {
    VolumeEval e;
    const Vec3 e1 = x[1] - x[0], e2 = x[2] - x[0], e3 = x[3] - x[0];
    e.error = dot(e1, cross(e2, e3)) - 6.0 * rest_volume;
    e.gradients[1] = cross(e2, e3);
    e.gradients[2] = cross(e3, e1);
    e.gradients[3] = cross(e1, e2);
    e.gradients[0] = -(e.gradients[1] + e.gradients[2] + e.gradients[3]);
    return e;
}

Vec3 anchor_target(std::span<const Vec3> path, std::size_t frame, int substep, int num_substeps) {
    if (path.empty()) return {};
    const std::size_t last = path.size() - 1;
    const Vec3& from = path[std::min(frame, last)];
    const Vec3& to = path[std::min(frame + 1, last)];
    const double f = static_cast<double>(substep + 1) / static_cast<double>(num_substeps);
    return from + (to - from) * f;
}

bool solve_distance(DistanceConstraint& c, RigidBody& a, RigidBody& b, double h) {
    const Vec3 p1 = a.to_world(c.a.r_local);
    const Vec3 p2 = b.to_world(c.b.r_local);
    const DistanceEval e = evaluate_distance(p1, p2, c.rest_distance, c.mode);
    if (e.degenerate || e.error == 0.0) return false;
    const Vec3 n = e.grad_p2;
    const double w = generalized_inverse_mass_positional(a, c.a.r_local, n) +
                     generalized_inverse_mass_positional(b, c.b.r_local, n);
    const auto lambda = xpbd_lambda(e.error, w, c.common.compliance, h, c.common.lambda);
    if (!lambda) return false;
    c.common.lambda += *lambda;
    apply_positional_correction(a, c.a.r_local, n * *lambda);
    apply_positional_correction(b, c.b.r_local, n * -*lambda);
    return true;
}

bool solve_hinge(HingeConstraint& c, RigidBody& a, RigidBody& b, double h) {
    const AngularEval e = evaluate_hinge(rotate(a.orientation, c.axis_a_local), rotate(b.orientation, c.axis_b_local));
    return solve_angular(c.common, e, a, b, h);
}

bool solve_ball_joint(BallJointConstraint& c, RigidBody& a, RigidBody& b, double h) {
    const AngularEval e = evaluate_ball_joint(rotate(a.orientation, c.axis_a_local),
                                              rotate(b.orientation, c.axis_b_local), c.max_angle);
    return solve_angular(c.common, e, a, b, h);
}

bool solve_volume(VolumeConstraint& c, std::array<RigidBody*, 4> p, double h) {
    const VolumeEval e = evaluate_volume({p[0]->position, p[1]->position, p[2]->position, p[3]->position},
                                         c.rest_volume);
    if (e.error == 0.0) return false;
    double w = 0.0;
    double grad_norm = 0.0;
    for (std::size_t i = 0; i < 4; ++i) {
        w += p[i]->inverse_mass * length_squared(e.gradients[i]);
        grad_norm = std::max(grad_norm, length(e.gradients[i]));
    }
    if (grad_norm < 1e-12) return false;
    const auto lambda = xpbd_lambda(e.error, w, c.common.compliance, h, c.common.lambda);
    if (!lambda) return false;
    c.common.lambda += *lambda;
    for (std::size_t i = 0; i < 4; ++i) apply_positional_correction(*p[i], {}, e.gradients[i] * -*lambda);
    return true;
}

bool solve_anchor(AnchorConstraint& c, RigidBody& body, const Vec3& target, double h) {
    const Vec3 p = body.to_world(c.body.r_local);
    const DistanceEval e = evaluate_distance(target, p, 0.0, DistanceMode::Exact);
    if (e.degenerate || e.error == 0.0) return false;
    const Vec3 n = e.grad_p2;
    const double w = generalized_inverse_mass_positional(body, c.body.r_local, n);
    const auto lambda = xpbd_lambda(e.error, w, c.common.compliance, h, c.common.lambda);
    if (!lambda) return false;
    c.common.lambda += *lambda;
    apply_positional_correction(body, c.body.r_local, n * -*lambda);
    return true;
}

ConstraintForce constraint_force(double lambda, const Vec3& direction, double h, bool angular) {
    const Vec3 v = direction * (lambda / (h * h));
    return angular ? ConstraintForce{{}, v} : ConstraintForce{v, {}};
}

} // namespace pbrbd
