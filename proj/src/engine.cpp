#include "pbrbd/engine.hpp"

#include <chrono>
#include <cmath>
#include <string>

namespace pbrbd {

double SolverConfig::effective_restitution_cutoff() const {
    return restitution_cutoff ? *restitution_cutoff : 2.0 * length(gravity) * substep_dt();
}

void SolverConfig::validate() const {
    if (!(frame_dt > 0.0) || !std::isfinite(frame_dt)) throw InvalidConfig("frame_dt must be positive");
    if (num_substeps < 1) throw InvalidConfig("num_substeps must be at least 1");
    if (iterations_per_substep < 1) throw InvalidConfig("iterations_per_substep must be at least 1");
    if (!(jacobi_relaxation > 0.0 && jacobi_relaxation <= 1.0))
        throw InvalidConfig("jacobi_relaxation must lie in (0, 1]");
    if (!is_finite(gravity)) throw InvalidConfig("gravity must be finite");
    if (!(slop >= 0.0)) throw InvalidConfig("slop must be non-negative");
    if (restitution_cutoff && !(*restitution_cutoff >= 0.0))
        throw InvalidConfig("restitution_cutoff must be non-negative");
    if (!(divergence_energy_factor > 1.0)) throw InvalidConfig("divergence_energy_factor must exceed 1");
    if (!(broad_phase_margin >= 0.0)) throw InvalidConfig("broad_phase_margin must be non-negative");
}

Energy compute_energy(std::span<const RigidBody> bodies, const Vec3& gravity) {
    Energy e;
    for (const RigidBody& b : bodies) {
        if (b.is_static()) continue;
        const double m = b.mass();
        e.potential -= m * dot(gravity, b.position);
        e.kinetic_linear += 0.5 * m * length_squared(b.velocity);
        if (!b.is_particle()) {
            const Vec3& w = b.angular_velocity_local;
            e.kinetic_rotational += 0.5 * dot(w, b.inertia_body * w);
        }
    }
    return e;
}

BodyId Scene::add_body(const RigidBody& body) {
    bodies.push_back(body);
    return static_cast<BodyId>(bodies.size() - 1);
}

std::size_t Scene::add_constraint(const Constraint& c, bool keep_collisions) {
    const BodyList list = bodies_of(c);
    for (BodyId id : list.view())
        if (id >= bodies.size()) throw std::out_of_range("constraint references body " + std::to_string(id));
    if (!keep_collisions) {
        for (std::size_t i = 0; i < list.count; ++i)
            for (std::size_t j = i + 1; j < list.count; ++j) filter.ignore(list.ids[i], list.ids[j]);
    }
    constraints.push_back(c);
    return constraints.size() - 1;
}

void positional_update(Scene& scene, double h) {
    const Vec3 g = scene.config.gravity;
    const auto n = static_cast<std::ptrdiff_t>(scene.bodies.size());
#pragma omp parallel for if (scene.config.parallel) schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        RigidBody& b = scene.bodies[static_cast<std::size_t>(i)];
        b.prev_position = b.position;
        b.prev_orientation = b.orientation;
        if (b.is_static()) continue;
        b.velocity += (g + b.external_force * b.inverse_mass) * h;
        b.position += b.velocity * h;
        if (b.is_particle()) continue;
        const Vec3& w = b.angular_velocity_local;
        const Vec3 gyro = cross(w, b.inertia_body * w);
        b.angular_velocity_local += (b.inverse_inertia_body * (b.external_torque_local - gyro)) * h;
        b.orientation = integrate_orientation(b.orientation, b.angular_velocity_world(), h);
    }
}

void velocity_update(Scene& scene, double h) {
    const auto n = static_cast<std::ptrdiff_t>(scene.bodies.size());
#pragma omp parallel for if (scene.config.parallel) schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        RigidBody& b = scene.bodies[static_cast<std::size_t>(i)];
        if (b.is_static()) continue;
        b.velocity = (b.position - b.prev_position) / h;
        if (b.is_particle()) continue;
        Quat dq = b.orientation * b.prev_orientation.conjugate();
        if (dq.s < 0.0) dq = dq * -1.0;
        const Vec3 w = dq.s > 1e-9 ? dq.vec() * (2.0 / (dq.s * h)) : dq.vec() * (2.0 / h);
        b.set_angular_velocity_world(w);
    }
}

std::vector<bool> dynamic_mask(std::span<const RigidBody> bodies) {
    std::vector<bool> out(bodies.size());
    for (std::size_t i = 0; i < bodies.size(); ++i) out[i] = !bodies[i].is_static();
    return out;
}

std::vector<std::vector<std::size_t>> build_islands(std::span<const BodyList> items,
                                                    const std::vector<bool>& dynamic) {
    std::vector<std::vector<std::size_t>> batches;
    std::vector<std::vector<bool>> used;
    for (std::size_t i = 0; i < items.size(); ++i) {
        std::size_t color = 0;
        for (; color < batches.size(); ++color) {
            bool free = true;
            for (BodyId id : items[i].view())
                if (dynamic[id] && used[color][id]) {
                    free = false;
                    break;
                }
            if (free) break;
        }
        if (color == batches.size()) {
            batches.emplace_back();
            used.emplace_back(dynamic.size(), false);
        }
        batches[color].push_back(i);
        for (BodyId id : items[i].view())
            if (dynamic[id]) used[color][id] = true;
    }
    return batches;
}

JacobiAccumulator::JacobiAccumulator(std::span<const RigidBody> snapshot, Field field)
    : snapshot_(snapshot), field_(field), slots_(snapshot.size()) {}

void JacobiAccumulator::add(BodyId id, const RigidBody& after) {
    const RigidBody& before = snapshot_[id];
    Slot& s = slots_[id];
    if (field_ == Field::Pose) {
        s.d_linear += after.position - before.position;
        s.d_orientation = s.d_orientation + (after.orientation - before.orientation);
    } else {
        s.d_linear += after.velocity - before.velocity;
        s.d_angular += after.angular_velocity_local - before.angular_velocity_local;
    }
    ++s.count;
    s.last = finals_.size();
    finals_.push_back(after);
}

void JacobiAccumulator::apply(std::span<RigidBody> bodies, double relaxation) const {
    for (std::size_t id = 0; id < slots_.size(); ++id) {
        const Slot& s = slots_[id];
        if (s.count == 0) continue;
        RigidBody& b = bodies[id];
        const RigidBody& only = finals_[s.last];
        const bool verbatim = s.count == 1 && relaxation == 1.0;
        const double f = relaxation / static_cast<double>(s.count);
        if (field_ == Field::Pose) {
            if (verbatim) {
                b.position = only.position;
                b.orientation = only.orientation;
            } else {
                b.position += s.d_linear * f;
                b.orientation = normalized(b.orientation + s.d_orientation * f);
            }
        } else {
            if (verbatim) {
                b.velocity = only.velocity;
                b.angular_velocity_local = only.angular_velocity_local;
            } else {
                b.velocity += s.d_linear * f;
                b.angular_velocity_local += s.d_angular * f;
            }
        }
    }
}

namespace {

struct SubstepContext {
    double h;
    int substep;
    int num_substeps;
    std::size_t frame;
    ContactParams contact;
};

template <class... F>
struct Overloaded : F... {
    using F::operator()...;
};
template <class... F>
Overloaded(F...) -> Overloaded<F...>;

/// Private copies of the bodies one work item touches.
struct LocalBodies {
    BodyList ids;
    std::array<RigidBody, 4> bodies;

    LocalBodies(const BodyList& list, std::span<const RigidBody> source) : ids(list) {
        for (std::size_t i = 0; i < list.count; ++i) bodies[i] = source[list.ids[i]];
    }
    RigidBody& operator()(BodyId id) {
        for (std::size_t i = 0; i < ids.count; ++i)
            if (ids.ids[i] == id) return bodies[i];
        return bodies[0];
    }
};

template <class Get>
bool solve_constraint(Constraint& c, Get&& get, const SubstepContext& ctx) {
    return std::visit(
        Overloaded{
            [&](DistanceConstraint& k) { return solve_distance(k, get(k.a.body), get(k.b.body), ctx.h); },
            [&](HingeConstraint& k) { return solve_hinge(k, get(k.a), get(k.b), ctx.h); },
            [&](BallJointConstraint& k) { return solve_ball_joint(k, get(k.a), get(k.b), ctx.h); },
            [&](VolumeConstraint& k) {
                return solve_volume(k,
                                    {&get(k.particles[0]), &get(k.particles[1]), &get(k.particles[2]),
                                     &get(k.particles[3])},
                                    ctx.h);
            },
            [&](AnchorConstraint& k) {
                const Vec3 target = anchor_target(k.path, ctx.frame, ctx.substep, ctx.num_substeps);
                return solve_anchor(k, get(k.body.body), target, ctx.h);
            },
        },
        c);
}

template <class Get>
bool solve_contact(Contact& c, Get&& get, const SubstepContext& ctx) {
    RigidBody& a = get(c.body_a);
    RigidBody& b = get(c.body_b);
    bool moved = solve_contact_position(c, a, b);
    if (c.lambda_normal > 0.0) moved = solve_contact_static_friction(c, a, b, ctx.contact) || moved;
    return moved;
}

template <class Get>
bool solve_contact_velocity(const Contact& c, Get&& get, const SubstepContext& ctx) {
    RigidBody& a = get(c.body_a);
    RigidBody& b = get(c.body_b);
    bool changed = velocity_solve_restitution(c, a, b, ctx.h, ctx.contact);
    if (!c.static_friction_applied) changed = velocity_solve_dynamic_friction(c, a, b, ctx.h, ctx.contact) || changed;
    return changed;
}

BodyList contact_bodies(const Contact& c) {
    BodyList l;
    l.ids[0] = c.body_a;
    l.ids[1] = c.body_b;
    l.count = 2;
    return l;
}

/// Runs one sweep over `items` (indices into `lists`) with the configured
/// solver. `solve(i, get)` projects item i using `get` to fetch bodies.
template <class Solve>
void run_phase(Scene& scene, std::span<const BodyList> lists, std::span<const std::size_t> items,
               const std::vector<bool>& dynamic, JacobiAccumulator::Field field, Solve&& solve) {
    const SolverConfig& cfg = scene.config;
    if (items.empty()) return;
    auto global = [&scene](BodyId id) -> RigidBody& { return scene.bodies[id]; };

    if (cfg.solver_mode == SolverMode::Jacobi) {
        const std::vector<RigidBody> snapshot = scene.bodies;
        std::vector<std::optional<LocalBodies>> results(items.size());
        const auto n = static_cast<std::ptrdiff_t>(items.size());
#pragma omp parallel for if (cfg.parallel) schedule(static)
        for (std::ptrdiff_t k = 0; k < n; ++k) {
            const std::size_t i = items[static_cast<std::size_t>(k)];
            LocalBodies local(lists[i], snapshot);
            if (solve(i, local)) results[static_cast<std::size_t>(k)] = std::move(local);
        }
        JacobiAccumulator acc(snapshot, field);
        for (const auto& r : results) {
            if (!r) continue;
            for (std::size_t j = 0; j < r->ids.count; ++j)
                if (dynamic[r->ids.ids[j]]) acc.add(r->ids.ids[j], r->bodies[j]);
        }
        acc.apply(scene.bodies, cfg.jacobi_relaxation);
        return;
    }

    if (!cfg.parallel && cfg.gs_schedule == GsSchedule::Natural) {
        for (std::size_t i : items) solve(i, global);
        return;
    }

    std::vector<BodyList> subset;
    subset.reserve(items.size());
    for (std::size_t i : items) subset.push_back(lists[i]);
    for (const auto& batch : build_islands(subset, dynamic)) {
        const auto n = static_cast<std::ptrdiff_t>(batch.size());
#pragma omp parallel for if (cfg.parallel) schedule(static)
        for (std::ptrdiff_t k = 0; k < n; ++k) solve(items[batch[static_cast<std::size_t>(k)]], global);
    }
}

std::vector<Contact> detect_contacts(const Scene& scene, const std::vector<CandidatePair>& pairs) {
    std::vector<std::vector<Contact>> per_pair(pairs.size());
    const auto n = static_cast<std::ptrdiff_t>(pairs.size());
#pragma omp parallel for if (scene.config.parallel) schedule(dynamic, 16)
    for (std::ptrdiff_t i = 0; i < n; ++i)
        per_pair[static_cast<std::size_t>(i)] =
            narrow_phase(scene.bodies, pairs[static_cast<std::size_t>(i)], scene.config.slop);
    std::vector<Contact> out;
    for (auto& v : per_pair) out.insert(out.end(), v.begin(), v.end());
    return out;
}

std::vector<std::size_t> iota_indices(std::size_t n) {
    std::vector<std::size_t> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = i;
    return v;
}

} // namespace

StepReport step(Scene& scene) {
    StepReport report;
    if (scene.bodies.empty()) return report;
    const SolverConfig& cfg = scene.config;
    cfg.validate();
    const auto t0 = std::chrono::steady_clock::now();
    if (!scene.initial_energy) scene.record_initial_energy();

    const double h = cfg.substep_dt();
    const BroadPhaseParams bp{cfg.frame_dt, cfg.broad_phase_margin, cfg.gravity};
    const std::vector<CandidatePair> pairs = broad_phase(scene.bodies, bp, scene.filter);
    if (!scene.contacts_initialized) {
        scene.contacts = detect_contacts(scene, pairs);
        scene.contacts_initialized = true;
    }

    const std::vector<bool> dynamic = dynamic_mask(scene.bodies);
    std::vector<BodyList> constraint_lists;
    constraint_lists.reserve(scene.constraints.size());
    for (const Constraint& c : scene.constraints) constraint_lists.push_back(bodies_of(c));
    const std::vector<std::size_t> all_constraints = iota_indices(scene.constraints.size());

    SubstepContext ctx{h, 0, cfg.num_substeps, scene.frame,
                       ContactParams{cfg.effective_restitution_cutoff(), cfg.friction_combine}};

    for (int sub = 0; sub < cfg.num_substeps; ++sub) {
        ctx.substep = sub;
        positional_update(scene, h);

        for (Constraint& c : scene.constraints) common_of(c).lambda = 0.0;
        std::vector<BodyList> contact_lists;
        contact_lists.reserve(scene.contacts.size());
        for (Contact& c : scene.contacts) {
            c.lambda_normal = 0.0;
            c.lambda_tangent = 0.0;
            c.static_friction_applied = false;
            c.pre_solve_normal_speed =
                dot(relative_contact_velocity(c, scene.bodies[c.body_a], scene.bodies[c.body_b]), c.normal);
            contact_lists.push_back(contact_bodies(c));
        }
        for (int it = 0; it < cfg.iterations_per_substep; ++it) {
            run_phase(scene, constraint_lists, all_constraints, dynamic, JacobiAccumulator::Field::Pose,
                      [&](std::size_t i, auto&& get) { return solve_constraint(scene.constraints[i], get, ctx); });
            // the phase corrects contacts already penetrating when it starts; overlap a
            // correction pushes into a neighbour is picked up next phase
            std::vector<std::size_t> penetrating;
            for (std::size_t i = 0; i < scene.contacts.size(); ++i) {
                const Contact& c = scene.contacts[i];
                if (current_depth(c, scene.bodies[c.body_a], scene.bodies[c.body_b]) > 0.0) penetrating.push_back(i);
            }
            run_phase(scene, contact_lists, penetrating, dynamic, JacobiAccumulator::Field::Pose,
                      [&](std::size_t i, auto&& get) { return solve_contact(scene.contacts[i], get, ctx); });
        }

        velocity_update(scene, h);

        std::vector<Contact> solved = std::move(scene.contacts);
        scene.contacts = detect_contacts(scene, pairs);

        std::vector<std::size_t> active;
        for (std::size_t i = 0; i < solved.size(); ++i)
            if (solved[i].lambda_normal > 0.0) active.push_back(i);
        run_phase(scene, contact_lists, active, dynamic, JacobiAccumulator::Field::Velocity,
                  [&](std::size_t i, auto&& get) { return solve_contact_velocity(solved[i], get, ctx); });
    }

    ++scene.frame;
    scene.time = static_cast<double>(scene.frame) * cfg.frame_dt;

    const double energy = scene.energy().total();
    const double e0 = *scene.initial_energy;
    if (!std::isfinite(energy) || energy > cfg.divergence_energy_factor * std::max(std::abs(e0), 1e-9))
        scene.diverged = true;

    const auto t1 = std::chrono::steady_clock::now();
    report.ms_step = std::chrono::duration<double, std::milli>(t1 - t0).count();
    report.ms_per_substep = report.ms_step / cfg.num_substeps;
    report.candidate_pairs = pairs.size();
    report.contacts = scene.contacts.size();
    report.diverged = scene.diverged;
    return report;
}

} // namespace pbrbd
