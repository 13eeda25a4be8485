#pragma once

#include <cstdint>
#include <optional>

#include "pbrbd/shapes.hpp"
#include "pbrbd/vecmath.hpp"

namespace pbrbd {

using BodyId = std::uint32_t;

struct Material {
    double restitution = 0.5;
    double static_friction = 0.5;
    double dynamic_friction = 0.3;
};

/// Point mass. Stored in a scene as a RigidBody with kind Particle: it never
/// rotates and carries zero inverse inertia.
struct Particle {
    Vec3 position;
    Vec3 prev_position;
    Vec3 velocity;
    double inverse_mass = 1.0;
    Vec3 external_force;
    // optional sphere collider so particle networks can touch the world
    std::optional<double> collision_radius;
    Material material;
};

enum class BodyKind : std::uint8_t { Rigid, Particle };

struct RigidBody {
    BodyKind kind = BodyKind::Rigid;

    Vec3 position;
    Vec3 prev_position;
    Quat orientation;
    Quat prev_orientation;

    Vec3 velocity;
    // body frame
    Vec3 angular_velocity_local;

    double inverse_mass = 0.0;
    Mat3 inertia_body = Mat3::zero();
    Mat3 inverse_inertia_body = Mat3::zero();

    Vec3 external_force;
    Vec3 external_torque_local;

    Material material;
    std::optional<ColliderShape> collider;

    bool is_static() const { return inverse_mass == 0.0; }
    bool is_particle() const { return kind == BodyKind::Particle; }
    double mass() const { return inverse_mass > 0.0 ? 1.0 / inverse_mass : 0.0; }

    Vec3 angular_velocity_world() const { return rotate(orientation, angular_velocity_local); }
    void set_angular_velocity_world(const Vec3& w) { angular_velocity_local = rotate_inverse(orientation, w); }

    Vec3 to_world(const Vec3& r_local) const { return position + rotate(orientation, r_local); }
    Vec3 to_local(const Vec3& p_world) const { return rotate_inverse(orientation, p_world - position); }

    /// World-frame inverse inertia applied to a world vector.
    Vec3 apply_inverse_inertia_world(const Vec3& v_world) const {
        return rotate(orientation, inverse_inertia_body * rotate_inverse(orientation, v_world));
    }
};

/// Body-frame inertia tensor of a solid primitive of the given mass.
/// Throws InvalidShape for non-positive dimensions/mass and for half-spaces.
Mat3 inertia_tensor(const ColliderShape& shape, double mass);

/// Dynamic body with the shape's inertia tensor.
RigidBody make_dynamic_body(const ColliderShape& shape, double mass, const Vec3& position,
                            const Quat& orientation = Quat::identity(), const Material& material = {});
/// Immovable body: zero inverse mass and zero inverse inertia.
RigidBody make_static_body(const std::optional<ColliderShape>& shape, const Vec3& position,
                           const Quat& orientation = Quat::identity(), const Material& material = {});
RigidBody make_particle_body(const Particle& p);

/// w + (r x q^-1 n)^T I^-1 (r x q^-1 n) for a positional correction along
/// `direction_world` applied at body-frame offset `r_local`.
double generalized_inverse_mass_positional(const RigidBody& body, const Vec3& r_local, const Vec3& direction_world);

/// n_self^T I^-1 n_self with n_self = q^-1 n.
double generalized_inverse_mass_angular(const RigidBody& body, const Vec3& axis_world);

/// Applies a positional impulse p (already scaled by lambda) at body-frame
/// offset r_local: x += w p, and q += 0.5 (0, q (I^-1 (r x q^-1 p))) q,
/// renormalized. Static bodies are left untouched.
void apply_positional_correction(RigidBody& body, const Vec3& r_local, const Vec3& impulse_world);

/// Rotational correction of `magnitude` about `axis_world`:
/// p = n lambda, p = q I^-1 q^-1 p, q += sign 0.5 (0, p) q, renormalized.
void apply_angular_correction(RigidBody& body, const Vec3& axis_world, double magnitude, double sign);

} // namespace pbrbd
