#include "pbrbd/scenarios.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>
#include <set>
#include <string>
#include <utility>

namespace pbrbd {

namespace {

struct NameEntry {
    ScenarioName name;
    const char* text;
    int default_n;
    int min_n;
    double duration;
};

constexpr std::array<NameEntry, 14> kNames{{
    {ScenarioName::Cradle, "cradle", 4, 2, 30.0},
    {ScenarioName::TriplePendulum, "triple_pendulum", 3, 1, 10.0},
    {ScenarioName::Chain, "chain", 100, 1, 10.0},
    {ScenarioName::Stack, "stack", 100, 1, 10.0},
    {ScenarioName::Pyramid, "pyramid", 650, 1, 10.0},
    {ScenarioName::RodSpin, "rod_spin", 1, 1, 30.0},
    {ScenarioName::PlaneSpin, "plane_spin", 1, 1, 30.0},
    {ScenarioName::RampCube, "ramp_cube", 1, 1, 4.0},
    {ScenarioName::RampSphere, "ramp_sphere", 1, 1, 4.0},
    {ScenarioName::OverlapPyramid, "overlap_pyramid", 30, 5, 10.0},
    {ScenarioName::OverconstrainedChain, "overconstrained_chain", 5, 2, 5.0},
    {ScenarioName::CapsulePile, "capsule_pile", 100, 1, 10.0},
    {ScenarioName::SoftbodyTetra, "softbody_tetra", 2, 1, 5.0},
    {ScenarioName::DragAnchor, "drag_anchor", 1, 1, 10.0},
}};

const NameEntry& entry(ScenarioName name) {
    for (const auto& e : kNames)
        if (e.name == name) return e;
    throw UnknownScenario("unknown scenario id");
}

double deg(double d) { return d * std::numbers::pi / 180.0; }

BodyId add_ground(Scene& s, const Material& m) {
    return s.add_body(make_static_body(ColliderShape{HalfSpace{{0.0, 1.0, 0.0}, 0.0}}, {}, Quat::identity(), m));
}

BodyId add_point_anchor(Scene& s, const Vec3& p) { return s.add_body(make_static_body(std::nullopt, p)); }

// local +y onto world +x
const Quat kAlongX = Quat::from_axis_angle({0.0, 0.0, 1.0}, -std::numbers::pi / 2.0);

DistanceConstraint joint(BodyId a, const Vec3& ra, BodyId b, const Vec3& rb, double compliance,
                         double rest = 0.0, DistanceMode mode = DistanceMode::Exact) {
    DistanceConstraint c;
    c.common.compliance = compliance;
    c.a = {a, ra};
    c.b = {b, rb};
    c.rest_distance = rest;
    c.mode = mode;
    return c;
}

void build_cradle(Scenario& out, const ScenarioSpec& spec, Material m) {
    Scene& s = out.scene;
    m.restitution = 1.0;
    m.static_friction = 0.0;
    m.dynamic_friction = 0.0;
    spec.material.apply(m);
    const double r = dims::sphere_radius;
    const double wire = dims::cradle_wire;
    const double top = wire + 1.0;
    for (int i = 0; i < out.n; ++i) {
        const Vec3 anchor{2.0 * r * i, top, 0.0};
        Vec3 p = anchor + Vec3{0.0, -wire, 0.0};
        if (i == 0) {
            const double a = deg(dims::cradle_release_deg);
            p = anchor + Vec3{-wire * std::sin(a), -wire * std::cos(a), 0.0};
        }
        const BodyId anchor_id = add_point_anchor(s, anchor);
        const BodyId sphere = s.add_body(make_dynamic_body(Sphere{r}, 1.0, p, Quat::identity(), m));
        s.add_constraint(joint(anchor_id, {}, sphere, {}, spec.compliance.value_or(0.0), wire,
                               DistanceMode::MaxDistance));
        out.focus.push_back(sphere);
    }
    s.config.num_substeps = 40;
}

void build_triple_pendulum(Scenario& out, const ScenarioSpec& spec, const Material& m) {
    Scene& s = out.scene;
    const double top = out.n + 1.0;
    Particle anchor;
    anchor.position = anchor.prev_position = {0.0, top, 0.0};
    anchor.inverse_mass = 0.0;
    BodyId prev = s.add_body(make_particle_body(anchor));
    for (int i = 1; i <= out.n; ++i) {
        Particle p;
        p.position = p.prev_position = {static_cast<double>(i), top, 0.0};
        p.inverse_mass = 1.0;
        p.material = m;
        const BodyId id = s.add_body(make_particle_body(p));
        s.add_constraint(joint(prev, {}, id, {}, spec.compliance.value_or(0.0), 1.0));
        out.focus.push_back(id);
        prev = id;
    }
    s.config.num_substeps = 20;
}

/// Horizontal capsule chain along +x from `start`, joined end to end.
std::vector<BodyId> lay_capsules(Scene& s, int n, const Vec3& start, double pitch, double compliance,
                                 const Material& m) {
    const double end = dims::capsule_half_length + dims::capsule_radius;
    std::vector<BodyId> ids;
    for (int i = 0; i < n; ++i) {
        const Vec3 c = start + Vec3{pitch * (i + 0.5), 0.0, 0.0};
        const BodyId id = s.add_body(
            make_dynamic_body(Capsule{dims::capsule_half_length, dims::capsule_radius}, 1.0, c, kAlongX, m));
        if (!ids.empty()) s.add_constraint(joint(ids.back(), {0.0, end, 0.0}, id, {0.0, -end, 0.0}, compliance));
        ids.push_back(id);
    }
    return ids;
}

void build_chain(Scenario& out, const ScenarioSpec& spec, const Material& m) {
    Scene& s = out.scene;
    const double end = dims::capsule_half_length + dims::capsule_radius;
    const double compliance = spec.compliance.value_or(0.0);
    const double height = 2.0 * end * out.n + 2.0 * dims::sphere_radius + 2.0;
    const Vec3 start{0.0, height, 0.0};
    const BodyId anchor = add_point_anchor(s, start);
    const auto links = lay_capsules(s, out.n, start, 2.0 * end, compliance, m);
    s.add_constraint(joint(anchor, {}, links.front(), {0.0, -end, 0.0}, compliance));
    const double r = dims::sphere_radius;
    const Vec3 centre = start + Vec3{2.0 * end * out.n + r, 0.0, 0.0};
    const BodyId heavy =
        s.add_body(make_dynamic_body(Sphere{r}, dims::heavy_sphere_mass_ratio, centre, Quat::identity(), m));
    s.add_constraint(joint(links.back(), {0.0, end, 0.0}, heavy, {-r, 0.0, 0.0}, compliance));
    out.focus = links;
    out.focus.push_back(heavy);
    s.config.num_substeps = 20;
}

void build_stack(Scenario& out, const Material& m) {
    Scene& s = out.scene;
    add_ground(s, m);
    const double side = dims::cube_side;
    BodyId top = 0;
    for (int i = 0; i < out.n; ++i)
        top = s.add_body(make_dynamic_body(Box{{0.5 * side, 0.5 * side, 0.5 * side}}, 1.0,
                                           {0.0, 0.5 * side + side * i, 0.0}, Quat::identity(), m));
    out.tracked = top;
    out.focus = {top};
    s.config.num_substeps = 20;
}

void build_pyramid(Scenario& out, const Material& m, double overlap) {
    Scene& s = out.scene;
    const auto layers = pyramid_layers(out.n);
    if (!layers)
        throw InvalidSize("pyramid size " + std::to_string(out.n) +
                          " is not a square-pyramidal number (1, 5, 14, 30, 55, ...)");
    add_ground(s, m);
    const double side = dims::cube_side;
    const double pitch = side + dims::pyramid_gap;
    BodyId top = 0;
    for (int layer = 0; layer < *layers; ++layer) {
        const int k = *layers - layer;
        const double y = 0.5 * side + layer * (side - overlap);
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < k; ++j) {
                const Vec3 p{(i - 0.5 * (k - 1)) * pitch, y, (j - 0.5 * (k - 1)) * pitch};
                top = s.add_body(make_dynamic_body(Box{{0.5 * side, 0.5 * side, 0.5 * side}}, 1.0, p,
                                                   Quat::identity(), m));
            }
    }
    out.tracked = top;
    out.focus = {top};
    s.config.num_substeps = 20;
}

void build_spinner(Scenario& out, const ScenarioSpec& spec, Material m, const Vec3& half_extents) {
    Scene& s = out.scene;
    m.restitution = 1.0;
    m.static_friction = 0.0;
    m.dynamic_friction = 0.0;
    spec.material.apply(m);
    add_ground(s, m);
    for (int i = 0; i < out.n; ++i) {
        RigidBody b = make_dynamic_body(Box{half_extents}, 1.0, {4.0 * i, 3.0, 0.0}, Quat::identity(), m);
        b.angular_velocity_local = {6.0, 0.05, 0.02};
        out.focus.push_back(s.add_body(b));
    }
    s.config.num_substeps = 20;
}

void build_ramp(Scenario& out, const ScenarioSpec& spec, Material m, bool sphere) {
    Scene& s = out.scene;
    m.static_friction = 0.3;
    m.dynamic_friction = 0.3;
    spec.material.apply(m);
    const Vec3 ramp_half{5.0, 0.5, 2.0};
    const Quat tilt = Quat::from_axis_angle({0.0, 0.0, 1.0}, -deg(dims::ramp_incline_deg));
    const Vec3 ramp_centre{0.0, 10.0, 0.0};
    const BodyId ramp = s.add_body(make_static_body(ColliderShape{Box{ramp_half}}, ramp_centre, tilt, m));
    const double lift = sphere ? dims::sphere_radius : 0.5 * dims::cube_side;
    const Vec3 local{-ramp_half.x + 1.0, ramp_half.y + lift, 0.0};
    const Vec3 p = ramp_centre + rotate(tilt, local);
    const ColliderShape shape = sphere ? ColliderShape{Sphere{dims::sphere_radius}}
                                       : ColliderShape{Box{{0.5, 0.5, 0.5}}};
    const BodyId body = s.add_body(make_dynamic_body(shape, 1.0, p, sphere ? Quat::identity() : tilt, m));
    out.tracked = body;
    out.focus = {ramp, body};
    s.config.num_substeps = 20;
}

void build_overconstrained(Scenario& out, const ScenarioSpec& spec, const Material& m) {
    Scene& s = out.scene;
    const double end = dims::capsule_half_length + dims::capsule_radius;
    const double rest_length = 2.0 * end * out.n;
    const double span = dims::overconstrained_stretch * rest_length;
    const double compliance = spec.compliance.value_or(0.0);
    const Vec3 left{0.0, 5.0, 0.0};
    const Vec3 right = left + Vec3{span, 0.0, 0.0};
    const BodyId a = add_point_anchor(s, left);
    const BodyId b = add_point_anchor(s, right);
    const auto links = lay_capsules(s, out.n, left, span / out.n, compliance, m);
    s.add_constraint(joint(a, {}, links.front(), {0.0, -end, 0.0}, compliance));
    s.add_constraint(joint(links.back(), {0.0, end, 0.0}, b, {}, compliance));
    out.focus = links;
    s.config.num_substeps = 20;
}

void build_capsule_pile(Scenario& out, const ScenarioSpec& spec, const Material& m) {
    Scene& s = out.scene;
    add_ground(s, m);
    std::mt19937_64 rng(spec.seed);
    std::uniform_real_distribution<double> jitter(-0.1, 0.1);
    std::uniform_real_distribution<double> yaw(0.0, 2.0 * std::numbers::pi);
    constexpr int per_row = 5;
    constexpr double spacing = 1.5;
    for (int i = 0; i < out.n; ++i) {
        const int layer = i / (per_row * per_row);
        const int cell = i % (per_row * per_row);
        const Vec3 p{(cell % per_row - 0.5 * (per_row - 1)) * spacing + jitter(rng), 1.0 + 1.0 * layer,
                     (cell / per_row - 0.5 * (per_row - 1)) * spacing + jitter(rng)};
        const Quat q = Quat::from_axis_angle({0.0, 1.0, 0.0}, yaw(rng)) * kAlongX;
        out.focus.push_back(s.add_body(
            make_dynamic_body(Capsule{dims::capsule_half_length, dims::capsule_radius}, 1.0, p, q, m)));
    }
    s.config.num_substeps = 20;
}

void build_softbody(Scenario& out, const ScenarioSpec& spec, const Material& m) {
    Scene& s = out.scene;
    add_ground(s, m);
    const int cells = out.n;
    const int side = cells + 1;
    const double pitch = 0.5;
    const double lift = 1.0;
    auto index = [side](int i, int j, int k) { return (i * side + j) * side + k; };
    std::vector<BodyId> ids;
    for (int i = 0; i < side; ++i)
        for (int j = 0; j < side; ++j)
            for (int k = 0; k < side; ++k) {
                Particle p;
                p.position = p.prev_position = {i * pitch, lift + j * pitch, k * pitch};
                p.inverse_mass = 10.0;
                p.collision_radius = 0.05;
                p.material = m;
                ids.push_back(s.add_body(make_particle_body(p)));
            }
    const double compliance = spec.compliance.value_or(1e-5);
    std::set<std::pair<BodyId, BodyId>> edges;
    // six tetrahedra per cell along the main diagonal
    constexpr std::array<std::array<int, 3>, 6> orders{
        {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};
    for (int i = 0; i < cells; ++i)
        for (int j = 0; j < cells; ++j)
            for (int k = 0; k < cells; ++k)
                for (const auto& order : orders) {
                    std::array<int, 3> c{i, j, k};
                    std::array<BodyId, 4> t{};
                    t[0] = ids[index(c[0], c[1], c[2])];
                    for (int step = 0; step < 3; ++step) {
                        ++c[order[step]];
                        t[step + 1] = ids[index(c[0], c[1], c[2])];
                    }
                    auto pos = [&s](BodyId id) { return s.bodies[id].position; };
                    double v = signed_tet_volume(pos(t[0]), pos(t[1]), pos(t[2]), pos(t[3]));
                    if (v < 0.0) {
                        std::swap(t[2], t[3]);
                        v = -v;
                    }
                    VolumeConstraint vc;
                    vc.common.compliance = compliance;
                    vc.particles = t;
                    vc.rest_volume = v;
                    s.add_constraint(vc);
                    for (int a = 0; a < 4; ++a)
                        for (int b = a + 1; b < 4; ++b) edges.insert(std::minmax(t[a], t[b]));
                }
    for (const auto& [a, b] : edges)
        s.add_constraint(joint(a, {}, b, {}, compliance, length(s.bodies[b].position - s.bodies[a].position)));
    out.focus = ids;
    s.config.num_substeps = 20;
}

void build_drag(Scenario& out, const ScenarioSpec& spec, const Material& m) {
    Scene& s = out.scene;
    add_ground(s, m);
    const BodyId box = s.add_body(make_dynamic_body(Box{{0.5, 0.5, 0.5}}, 1.0, {0.0, 0.5, 0.0}, Quat::identity(), m));
    AnchorConstraint a;
    a.common.compliance = spec.compliance.value_or(1e-3);
    a.body = {box, {0.0, 0.5, 0.0}};
    const int frames = static_cast<int>(std::lround(out.default_duration / s.config.frame_dt));
    const double speed = 1.0;
    for (int f = 0; f <= frames; ++f) a.path.push_back({speed * f * s.config.frame_dt, 1.0, 0.0});
    s.add_constraint(a);
    out.tracked = box;
    out.focus = {box};
    s.config.num_substeps = 20;
}

} // namespace

const char* to_string(ScenarioName name) { return entry(name).text; }

ScenarioName parse_scenario(std::string_view text) {
    for (const auto& e : kNames)
        if (text == e.text) return e.name;
    throw UnknownScenario("unknown scenario '" + std::string(text) + "'");
}

const std::vector<ScenarioName>& all_scenarios() {
    static const std::vector<ScenarioName> names = [] {
        std::vector<ScenarioName> v;
        for (const auto& e : kNames) v.push_back(e.name);
        return v;
    }();
    return names;
}

int default_size(ScenarioName name) { return entry(name).default_n; }
int minimum_size(ScenarioName name) { return entry(name).min_n; }

void MaterialOverride::apply(Material& m) const {
    if (restitution) m.restitution = *restitution;
    if (static_friction) m.static_friction = *static_friction;
    if (dynamic_friction) m.dynamic_friction = *dynamic_friction;
}

void ConfigOverrides::apply(SolverConfig& c) const {
    if (frame_dt) c.frame_dt = *frame_dt;
    if (num_substeps) c.num_substeps = *num_substeps;
    if (iterations_per_substep) c.iterations_per_substep = *iterations_per_substep;
    if (solver_mode) c.solver_mode = *solver_mode;
    if (jacobi_relaxation) c.jacobi_relaxation = *jacobi_relaxation;
    if (parallel) c.parallel = *parallel;
    if (slop) c.slop = *slop;
    if (restitution_cutoff) c.restitution_cutoff = *restitution_cutoff;
    if (divergence_energy_factor) c.divergence_energy_factor = *divergence_energy_factor;
}

std::optional<int> pyramid_layers(int n) {
    int total = 0;
    for (int layers = 1; total < n; ++layers) {
        total += layers * layers;
        if (total == n) return layers;
    }
    return std::nullopt;
}

Scenario build(const ScenarioSpec& spec) {
    const NameEntry& e = entry(spec.name);
    Scenario out;
    out.name = spec.name;
    out.n = spec.n == 0 ? e.default_n : spec.n;
    out.default_duration = e.duration;
    if (out.n < e.min_n)
        throw InvalidSize(std::string(e.text) + " needs n >= " + std::to_string(e.min_n) + ", got " +
                          std::to_string(out.n));
    Material m;
    spec.material.apply(m);

    switch (spec.name) {
    case ScenarioName::Cradle: build_cradle(out, spec, m); break;
    case ScenarioName::TriplePendulum: build_triple_pendulum(out, spec, m); break;
    case ScenarioName::Chain: build_chain(out, spec, m); break;
    case ScenarioName::Stack: build_stack(out, m); break;
    case ScenarioName::Pyramid: build_pyramid(out, m, 0.0); break;
    case ScenarioName::RodSpin: build_spinner(out, spec, m, {0.1, 0.1, 1.0}); break;
    case ScenarioName::PlaneSpin: build_spinner(out, spec, m, {1.0, 1.0, 0.1}); break;
    case ScenarioName::RampCube: build_ramp(out, spec, m, false); break;
    case ScenarioName::RampSphere: build_ramp(out, spec, m, true); break;
    case ScenarioName::OverlapPyramid: build_pyramid(out, m, spec.overlap_depth); break;
    case ScenarioName::OverconstrainedChain: build_overconstrained(out, spec, m); break;
    case ScenarioName::CapsulePile: build_capsule_pile(out, spec, m); break;
    case ScenarioName::SoftbodyTetra: build_softbody(out, spec, m); break;
    case ScenarioName::DragAnchor: build_drag(out, spec, m); break;
    }
    spec.config.apply(out.scene.config);
    out.scene.config.validate();
    out.scene.record_initial_energy();
    return out;
}

} // namespace pbrbd
