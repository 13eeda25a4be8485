#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "pbrbd/bodies.hpp"
#include "pbrbd/collision.hpp"
#include "pbrbd/constraints.hpp"
#include "pbrbd/contacts.hpp"

namespace pbrbd {

enum class SolverMode { GaussSeidel, Jacobi };

/// Order of Gauss-Seidel sweeps. Natural walks items in storage order;
/// Batched walks the body-disjoint batches in order (the parallel schedule).
enum class GsSchedule { Natural, Batched };

class InvalidConfig : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct SolverConfig {
    double frame_dt = 1.0 / 60.0;
    int num_substeps = 10;
    int iterations_per_substep = 1;
    SolverMode solver_mode = SolverMode::GaussSeidel;
    double jacobi_relaxation = 1.0;
    bool parallel = false;
    GsSchedule gs_schedule = GsSchedule::Natural;
    Vec3 gravity{0.0, -9.81, 0.0};
    double slop = 1e-4;
    /// Defaults to 2 |g| h when unset.
    std::optional<double> restitution_cutoff;
    double divergence_energy_factor = 10.0;
    double broad_phase_margin = 0.05;
    FrictionCombine friction_combine = FrictionCombine::GeometricMean;

    double substep_dt() const { return frame_dt / num_substeps; }
    double effective_restitution_cutoff() const;
    /// Throws InvalidConfig naming the offending field.
    void validate() const;
};

struct Energy {
    double potential = 0.0;
    double kinetic_linear = 0.0;
    double kinetic_rotational = 0.0;
    double total() const { return potential + kinetic_linear + kinetic_rotational; }
};

/// Potential relative to the plane through the origin normal to gravity,
/// plus linear and rotational kinetic energy. Static bodies contribute nothing.
Energy compute_energy(std::span<const RigidBody> bodies, const Vec3& gravity);

struct Scene {
    std::vector<RigidBody> bodies;
    std::vector<Constraint> constraints;
    /// Contacts to be position-solved in the next substep.
    std::vector<Contact> contacts;
    CollisionFilter filter;
    SolverConfig config;

    double time = 0.0;
    std::size_t frame = 0;
    bool contacts_initialized = false;
    std::optional<double> initial_energy;
    bool diverged = false;

    BodyId add_body(const RigidBody& body);
    /// Adds a constraint; pairs it joins stop colliding unless keep_collisions.
    std::size_t add_constraint(const Constraint& c, bool keep_collisions = false);
    Energy energy() const { return compute_energy(bodies, config.gravity); }
    void record_initial_energy() { initial_energy = energy().total(); }
};

struct StepReport {
    double ms_step = 0.0;
    double ms_per_substep = 0.0;
    std::size_t candidate_pairs = 0;
    std::size_t contacts = 0;
    bool diverged = false;
};

/// Saves the previous pose, integrates velocity (gravity + F w, gyroscopic
/// torque) and then pose, for every dynamic body.
void positional_update(Scene& scene, double h);

/// v = (x - x_prev) / h and w = 2 vec(dq) / (s(dq) h) with dq = q q_prev^-1,
/// taken on the short arc.
void velocity_update(Scene& scene, double h);

/// Greedy coloring of work items. No batch holds two items sharing a body
/// marked dynamic; batches preserve input order.
std::vector<std::vector<std::size_t>> build_islands(std::span<const BodyList> items,
                                                    const std::vector<bool>& dynamic);
std::vector<bool> dynamic_mask(std::span<const RigidBody> bodies);

/// Per-body averaging of corrections computed against a common snapshot.
class JacobiAccumulator {
public:
    enum class Field { Pose, Velocity };

    JacobiAccumulator(std::span<const RigidBody> snapshot, Field field);
    /// Records the change between snapshot[id] and `after` for one item.
    void add(BodyId id, const RigidBody& after);
    /// Applies (sum / count) * relaxation to every touched body. A body touched
    /// by exactly one item at relaxation 1 takes that item's result verbatim.
    void apply(std::span<RigidBody> bodies, double relaxation) const;
    std::size_t count(BodyId id) const { return slots_[id].count; }

private:
    struct Slot {
        Vec3 d_linear;
        Vec3 d_angular;
        Quat d_orientation{0.0, 0.0, 0.0, 0.0};
        std::size_t count = 0;
        std::size_t last = 0;
    };
    std::span<const RigidBody> snapshot_;
    Field field_;
    std::vector<Slot> slots_;
    std::vector<RigidBody> finals_;
};

/// One frame: broad phase, then num_substeps substeps of positional update,
/// constraint and contact position solves, velocity update, narrow phase and
/// velocity solve.
StepReport step(Scene& scene);

} // namespace pbrbd
