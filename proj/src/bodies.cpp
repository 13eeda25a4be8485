#include "pbrbd/bodies.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace pbrbd {

const char* to_string(ShapeKind k) {
    switch (k) {
    case ShapeKind::Sphere: return "sphere";
    case ShapeKind::Box: return "box";
    case ShapeKind::Capsule: return "capsule";
    case ShapeKind::HalfSpace: return "halfspace";
    }
    return "unknown";
}

void validate(const ColliderShape& shape) {
    std::visit(
        [](const auto& s) {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, Sphere>) {
                if (!(s.radius > 0.0)) throw InvalidShape("sphere radius must be positive");
            } else if constexpr (std::is_same_v<T, Box>) {
                if (!(s.half_extents.x > 0.0 && s.half_extents.y > 0.0 && s.half_extents.z > 0.0))
                    throw InvalidShape("box half extents must be positive");
            } else if constexpr (std::is_same_v<T, Capsule>) {
                if (!(s.half_length > 0.0 && s.radius > 0.0))
                    throw InvalidShape("capsule half length and radius must be positive");
            } else {
                if (std::abs(length(s.normal) - 1.0) > 1e-9) throw InvalidShape("half-space normal must be unit length");
            }
        },
        shape);
}

double bounding_radius(const ColliderShape& shape) {
    return std::visit(
        [](const auto& s) -> double {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, Sphere>)
                return s.radius;
            else if constexpr (std::is_same_v<T, Box>)
                return length(s.half_extents);
            else if constexpr (std::is_same_v<T, Capsule>)
                return s.half_length + s.radius;
            else
                return std::numeric_limits<double>::infinity();
        },
        shape);
}

Mat3 inertia_tensor(const ColliderShape& shape, double mass) {
    if (!(mass > 0.0)) throw InvalidShape("mass must be positive, got " + std::to_string(mass));
    validate(shape);
    return std::visit(
        [mass](const auto& s) -> Mat3 {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, Sphere>) {
                const double i = 0.4 * mass * s.radius * s.radius;
                return Mat3::diagonal({i, i, i});
            } else if constexpr (std::is_same_v<T, Box>) {
                const Vec3 d = 2.0 * s.half_extents;
                const double k = mass / 12.0;
                return Mat3::diagonal({k * (d.y * d.y + d.z * d.z), k * (d.x * d.x + d.z * d.z),
                                       k * (d.x * d.x + d.y * d.y)});
            } else if constexpr (std::is_same_v<T, Capsule>) {
                // cylinder plus two hemispherical caps, mass split by volume
                const double r = s.radius;
                const double len = 2.0 * s.half_length;
                const double v_cyl = std::numbers::pi * r * r * len;
                const double v_sph = 4.0 / 3.0 * std::numbers::pi * r * r * r;
                const double m_cyl = mass * v_cyl / (v_cyl + v_sph);
                const double m_sph = mass - m_cyl;
                const double axial = 0.5 * m_cyl * r * r + 0.4 * m_sph * r * r;
                // caps: 2/5 m r^2 about the base, COM 3r/8 from the base, shifted to the capsule center
                const double transverse = m_cyl * (len * len / 12.0 + r * r / 4.0) +
                                          m_sph * (0.4 * r * r + len * len / 4.0 + 3.0 * len * r / 8.0);
                return Mat3::diagonal({transverse, axial, transverse});
            } else {
                throw InvalidShape("half-space has no finite inertia");
            }
        },
        shape);
}

RigidBody make_dynamic_body(const ColliderShape& shape, double mass, const Vec3& position, const Quat& orientation,
                            const Material& material) {
    RigidBody b;
    b.kind = BodyKind::Rigid;
    b.position = b.prev_position = position;
    b.orientation = b.prev_orientation = normalized(orientation);
    b.inverse_mass = 1.0 / mass;
    b.inertia_body = inertia_tensor(shape, mass);
    b.inverse_inertia_body = invert_spd(b.inertia_body);
    b.material = material;
    b.collider = shape;
    return b;
}

RigidBody make_static_body(const std::optional<ColliderShape>& shape, const Vec3& position, const Quat& orientation,
                           const Material& material) {
    if (shape) validate(*shape);
    RigidBody b;
    b.position = b.prev_position = position;
    b.orientation = b.prev_orientation = normalized(orientation);
    b.material = material;
    b.collider = shape;
    return b;
}

RigidBody make_particle_body(const Particle& p) {
    RigidBody b;
    b.kind = BodyKind::Particle;
    b.position = p.position;
    b.prev_position = p.prev_position;
    b.velocity = p.velocity;
    b.inverse_mass = p.inverse_mass;
    b.external_force = p.external_force;
    b.material = p.material;
    if (p.collision_radius) b.collider = Sphere{*p.collision_radius};
    return b;
}

double generalized_inverse_mass_positional(const RigidBody& body, const Vec3& r_local, const Vec3& direction_world) {
    const Vec3 rn = cross(r_local, rotate_inverse(body.orientation, direction_world));
    return body.inverse_mass + dot(rn, body.inverse_inertia_body * rn);
}

double generalized_inverse_mass_angular(const RigidBody& body, const Vec3& axis_world) {
    const Vec3 n_self = rotate_inverse(body.orientation, axis_world);
    return dot(n_self, body.inverse_inertia_body * n_self);
}

void apply_positional_correction(RigidBody& body, const Vec3& r_local, const Vec3& impulse_world) {
    if (body.is_static()) return;
    body.position += impulse_world * body.inverse_mass;
    if (body.is_particle()) return;
    const Vec3 p_self = rotate_inverse(body.orientation, impulse_world);
    const Vec3 rotation = rotate(body.orientation, body.inverse_inertia_body * cross(r_local, p_self));
    if (rotation == Vec3{}) return;
    body.orientation = normalized(body.orientation + Quat::pure(rotation) * body.orientation * 0.5);
}

void apply_angular_correction(RigidBody& body, const Vec3& axis_world, double magnitude, double sign) {
    if (body.is_static() || body.is_particle() || magnitude == 0.0) return;
    const Vec3 p = axis_world * magnitude;
    const Vec3 p_self = rotate_inverse(body.orientation, p);
    const Vec3 rotation = rotate(body.orientation, body.inverse_inertia_body * p_self);
    body.orientation = normalized(body.orientation + Quat::pure(rotation) * body.orientation * (0.5 * sign));
}

} // namespace pbrbd
