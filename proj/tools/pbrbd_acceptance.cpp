// Runs every acceptance criterion and prints one PASS/FAIL line per criterion.
// Usage: pbrbd_acceptance [name-substring ...]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "pbrbd/harness.hpp"

using namespace pbrbd;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

struct Criterion {
    std::string name;
    double time_limit_s;
    std::function<Outcome()> run;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

bool finite(const Vec3& v) { return std::isfinite(v.x) && std::isfinite(v.y) && std::isfinite(v.z); }

RunResult run_spec(const ScenarioSpec& spec, std::optional<double> duration = std::nullopt,
                   const FrameObserver& observer = {}, bool stop_on_divergence = true) {
    RunManifest m;
    m.spec = spec;
    m.duration = duration;
    m.stop_on_divergence = stop_on_divergence;
    return run(m, observer);
}

ScenarioSpec spec_of(ScenarioName name, int n = 0) {
    ScenarioSpec s;
    s.name = name;
    s.n = n;
    return s;
}

// ---- gradients ------------------------------------------------------------

Vec3 random_unit(std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    for (;;) {
        const Vec3 v{g(rng), g(rng), g(rng)};
        if (length(v) > 1e-3) return normalized(v);
    }
}

double rel_error(const std::vector<double>& fd, const std::vector<double>& an) {
    double diff = 0.0, norm = 0.0;
    for (std::size_t i = 0; i < fd.size(); ++i) {
        diff += (fd[i] - an[i]) * (fd[i] - an[i]);
        norm += an[i] * an[i];
    }
    return std::sqrt(diff) / std::max(std::sqrt(norm), 1e-12);
}

// d error / d theta for rotations of v about the three world axes
template <class F> std::vector<double> fd_rotation(const Vec3& v, F error) {
    constexpr double eps = 1e-5;
    std::vector<double> out;
    for (const Vec3 axis : {Vec3{1, 0, 0}, Vec3{0, 1, 0}, Vec3{0, 0, 1}}) {
        const double plus = error(rotate(Quat::from_axis_angle(axis, eps), v));
        const double minus = error(rotate(Quat::from_axis_angle(axis, -eps), v));
        out.push_back((plus - minus) / (2.0 * eps));
    }
    return out;
}

template <class F> std::vector<double> fd_points(std::vector<Vec3> pts, F error) {
    constexpr double eps = 1e-5;
    std::vector<double> out;
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (int k = 0; k < 3; ++k) {
            const double keep = pts[i][k];
            pts[i][k] = keep + eps;
            const double plus = error(pts);
            pts[i][k] = keep - eps;
            const double minus = error(pts);
            pts[i][k] = keep;
            out.push_back((plus - minus) / (2.0 * eps));
        }
    return out;
}

std::vector<double> flat(std::initializer_list<Vec3> vs) {
    std::vector<double> out;
    for (const Vec3& v : vs) out.insert(out.end(), {v.x, v.y, v.z});
    return out;
}

Outcome gradients() {
    std::mt19937_64 rng(20240607);
    std::uniform_real_distribution<double> box(-2.0, 2.0);
    auto point = [&] { return Vec3{box(rng), box(rng), box(rng)}; };
    double worst_distance = 0.0, worst_hinge = 0.0, worst_ball = 0.0, worst_volume = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        {
            const Vec3 p1 = point(), p2 = point();
            const double rest = std::uniform_real_distribution<double>(0.1, 3.0)(rng);
            const DistanceEval e = evaluate_distance(p1, p2, rest, DistanceMode::Exact);
            const auto fd = fd_points({p1, p2}, [&](const std::vector<Vec3>& p) {
                return evaluate_distance(p[0], p[1], rest, DistanceMode::Exact).error;
            });
            worst_distance = std::max(worst_distance, rel_error(fd, flat({e.grad_p1, e.grad_p2})));
        }
        {
            const Vec3 a1 = random_unit(rng), a2 = random_unit(rng);
            const AngularEval e = evaluate_hinge(a1, a2);
            auto fa = fd_rotation(a1, [&](const Vec3& v) { return evaluate_hinge(v, a2).error; });
            const auto fb = fd_rotation(a2, [&](const Vec3& v) { return evaluate_hinge(a1, v).error; });
            fa.insert(fa.end(), fb.begin(), fb.end());
            worst_hinge = std::max(worst_hinge, rel_error(fa, flat({e.grad_a, e.grad_b})));
        }
        {
            Vec3 a1, a2;
            double sigma = 0.0;
            do {
                a1 = random_unit(rng);
                a2 = random_unit(rng);
                sigma = std::acos(std::clamp(dot(a1, a2), -1.0, 1.0));
            } while (sigma < 0.2 || sigma > std::numbers::pi - 0.1);
            const double limit = std::uniform_real_distribution<double>(0.0, sigma - 0.1)(rng);
            const AngularEval e = evaluate_ball_joint(a1, a2, limit);
            auto fa = fd_rotation(a1, [&](const Vec3& v) { return evaluate_ball_joint(v, a2, limit).error; });
            const auto fb = fd_rotation(a2, [&](const Vec3& v) { return evaluate_ball_joint(a1, v, limit).error; });
            fa.insert(fa.end(), fb.begin(), fb.end());
            worst_ball = std::max(worst_ball, rel_error(fa, flat({e.grad_a, e.grad_b})));
        }
        {
            const std::array<Vec3, 4> x{point(), point(), point(), point()};
            const double rest = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
            const VolumeEval e = evaluate_volume(x, rest);
            const auto fd = fd_points({x.begin(), x.end()}, [&](const std::vector<Vec3>& p) {
                return evaluate_volume({p[0], p[1], p[2], p[3]}, rest).error;
            });
            worst_volume = std::max(
                worst_volume, rel_error(fd, flat({e.gradients[0], e.gradients[1], e.gradients[2], e.gradients[3]})));
        }
    }
    const double worst = std::max({worst_distance, worst_hinge, worst_ball, worst_volume});
    return {worst < 1e-6, fmt("max relative error distance %.2e hinge %.2e ball %.2e volume %.2e", worst_distance,
                              worst_hinge, worst_ball, worst_volume)};
}

// ---- elastic collision ----------------------------------------------------

Outcome elastic_collision() {
    Scene s;
    s.config.gravity = {};
    const Material m{1.0, 0.0, 0.0};
    const BodyId a = s.add_body(make_dynamic_body(Sphere{0.5}, 1.0, {-1.5, 0.0, 0.0}, Quat::identity(), m));
    const BodyId b = s.add_body(make_dynamic_body(Sphere{0.5}, 1.0, {1.5, 0.0, 0.0}, Quat::identity(), m));
    s.bodies[a].velocity = {2.0, 0.0, 0.0};
    s.bodies[b].velocity = {-1.0, 0.0, 0.0};
    const Vec3 va0 = s.bodies[a].velocity, vb0 = s.bodies[b].velocity;
    const Vec3 p0 = va0 + vb0;
    const double ke0 = 0.5 * (length_squared(va0) + length_squared(vb0));
    s.record_initial_energy();
    for (int f = 0; f < 120; ++f) step(s);
    const Vec3 va = s.bodies[a].velocity, vb = s.bodies[b].velocity;
    const double swap_err = std::max(length(va - vb0), length(vb - va0));
    const double mom_err = length(va + vb - p0);
    const double ke = 0.5 * (length_squared(va) + length_squared(vb));
    const double ke_err = std::abs(ke - ke0) / ke0;
    return {swap_err < 1e-9 && mom_err < 1e-9 && ke_err < 1e-6,
            fmt("swap error %.2e, momentum error %.2e, relative KE error %.2e", swap_err, mom_err, ke_err)};
}

// ---- cradle ----------------------------------------------------------------

double energy_ripple(const std::vector<MetricsRow>& rows, double e0) {
    double lowest = e0, ripple = 0.0;
    for (const MetricsRow& r : rows) {
        lowest = std::min(lowest, r.total);
        ripple = std::max(ripple, (r.total - lowest) / std::abs(e0));
    }
    return ripple;
}

Outcome cradle() {
    const ScenarioSpec spec = spec_of(ScenarioName::Cradle, 4);
    // first impact: the striker loses most of its speed within one frame
    double striker_prev = 0.0, pre_impact = 0.0, impact_time = -1.0, middle_peak = 0.0;
    const double window = 0.9 * std::numbers::pi * std::sqrt(dims::cradle_wire / 9.81);
    const RunResult r = run_spec(spec, std::nullopt, [&](const Scenario& sc, const MetricsRow& row) {
        const auto& bodies = sc.scene.bodies;
        const double striker = length(bodies[sc.focus[0]].velocity);
        if (impact_time < 0.0 && striker_prev > 0.5 && striker < 0.5 * striker_prev) {
            impact_time = row.t;
            pre_impact = striker_prev;
        }
        if (impact_time >= 0.0 && row.t <= impact_time + window)
            middle_peak = std::max({middle_peak, length(bodies[sc.focus[1]].velocity),
                                    length(bodies[sc.focus[2]].velocity)});
        striker_prev = striker;
    });
    const double e0 = r.summary.initial_energy;
    const double ripple = energy_ripple(r.rows, e0);
    const double loss = (e0 - r.summary.final_energy) / std::abs(e0);
    const double ratio = pre_impact > 0.0 ? middle_peak / pre_impact : 1.0;
    return {impact_time >= 0.0 && ratio < 0.05 && ripple <= 0.01 && loss < 0.10,
            fmt("impact at %.3f s, middle peak / striker = %.4f, ripple %.4f, loss over %.0f s = %.4f", impact_time,
                ratio, ripple, r.summary.duration, loss)};
}

// ---- triple pendulum ---------------------------------------------------------

Outcome triple_pendulum() {
    ScenarioSpec spec = spec_of(ScenarioName::TriplePendulum);
    spec.config.num_substeps = 20;
    const RunResult r = run_spec(spec, 10.0);
    const double e0 = r.summary.initial_energy;
    const double gain = (r.summary.max_energy - e0) / std::abs(e0);
    return {gain <= 0.01, fmt("max energy gain %.5f of initial (final %.4f)", gain, r.summary.final_energy / e0)};
}

// ---- chains ------------------------------------------------------------------

bool recomputed_divergence(const RunResult& r, double factor) {
    const double e0 = r.summary.initial_energy;
    for (const MetricsRow& row : r.rows)
        if (!std::isfinite(row.total) || row.total > factor * std::max(std::abs(e0), 1e-9)) return true;
    return false;
}

Outcome chains() {
    ScenarioSpec spec = spec_of(ScenarioName::Chain, 100);
    spec.config.num_substeps = 20;
    const RunResult small = run_spec(spec);
    const double max_ratio = small.summary.max_energy / small.summary.initial_energy;
    const bool small_ok = !small.summary.diverged && max_ratio < 1.5;

    // synthetic blowup: the detector must fire
    Scene blow;
    blow.add_body(make_dynamic_body(Sphere{0.5}, 1.0, {0.0, 1.0, 0.0}));
    blow.record_initial_energy();
    blow.bodies[0].velocity = {1e4, 0.0, 0.0};
    const bool synthetic = step(blow).diverged;

    spec.n = 500;
    const RunResult big = run_spec(spec);
    const bool consistent = big.summary.diverged == recomputed_divergence(big, 10.0);
    return {small_ok && synthetic && consistent,
            fmt("chain 100: diverged %d, max energy %.4fx; synthetic blowup flagged %d; chain 500: diverged %d after "
                "%zu frames (detector consistent %d)",
                small.summary.diverged, max_ratio, synthetic, big.summary.diverged, big.summary.frames, consistent)};
}

// ---- stack -------------------------------------------------------------------

Outcome stack() {
    std::string detail;
    bool pass = true;
    for (SolverMode mode : {SolverMode::GaussSeidel, SolverMode::Jacobi}) {
        ScenarioSpec spec = spec_of(ScenarioName::Stack, 100);
        spec.config.solver_mode = mode;
        const RunResult r = run_spec(spec, 10.0);
        const bool ok = !r.summary.diverged && r.summary.max_dev_h < 0.5 * dims::cube_side;
        pass = pass && ok;
        detail += fmt("%s max dev_h %.4f dev_v %.4f%s; ", to_string(mode), r.summary.max_dev_h, r.summary.max_dev_v,
                      r.summary.diverged ? " (diverged)" : "");
    }
    return {pass, detail};
}

// ---- plane spin --------------------------------------------------------------

Outcome plane_spin() {
    const RunResult r = run_spec(spec_of(ScenarioName::PlaneSpin), 30.0);
    const double e0 = r.summary.initial_energy;
    const double lo = r.summary.min_energy / e0, hi = r.summary.max_energy / e0;
    return {!r.summary.diverged && lo >= 0.85 && hi <= 1.05, fmt("energy range [%.4f, %.4f] of initial", lo, hi)};
}

// ---- ramp --------------------------------------------------------------------

Outcome ramp_sphere() {
    ScenarioSpec spec = spec_of(ScenarioName::RampSphere);
    spec.material.static_friction = 0.3;
    spec.material.dynamic_friction = 0.3;
    std::size_t last_contact = 0, frame = 0;
    const RunResult r = run_spec(spec, std::nullopt, [&](const Scenario& sc, const MetricsRow&) {
        ++frame;
        for (const Contact& c : sc.scene.contacts)
            if ((c.body_a == sc.focus[0] || c.body_b == sc.focus[0])) last_contact = frame;
    });
    const double e0 = r.summary.initial_energy;
    const std::vector<MetricsRow> on(r.rows.begin(), r.rows.begin() + static_cast<std::ptrdiff_t>(last_contact));
    const double ripple = energy_ripple(on, e0);
    const bool left = last_contact < r.rows.size();
    double off_spread = 0.0;
    if (left) {
        const double e_leave = r.rows[last_contact].total;
        for (std::size_t i = last_contact; i < r.rows.size(); ++i)
            off_spread = std::max(off_spread, std::abs(r.rows[i].total - e_leave) / std::abs(e_leave));
    }
    return {left && ripple <= 0.005 && off_spread <= 0.01,
            fmt("left ramp at %.3f s (%d), ripple on ramp %.5f, off-ramp variation %.5f, loss on ramp %.4f",
                left ? r.rows[last_contact].t : -1.0, left, ripple, off_spread,
                left ? (e0 - r.rows[last_contact].total) / std::abs(e0) : 0.0)};
}

// ---- overconstrained chain ---------------------------------------------------

struct SettleResult {
    bool oscillating = false;
    std::optional<double> converged_at;
    double last_delta = 0.0;
};

SettleResult settle(ScenarioSpec spec) {
    SettleResult out;
    std::vector<std::vector<Vec3>> history;
    std::vector<Vec3> prev;
    run_spec(
        spec, 5.0,
        [&](const Scenario& sc, const MetricsRow& row) {
        std::vector<Vec3> now = dynamic_positions(sc.scene);
        if (!prev.empty()) {
            out.last_delta = max_displacement(prev, now);
            if (out.last_delta < 1e-6 && !out.converged_at) out.converged_at = row.t;
        }
        history.push_back(now);
        if (history.size() >= 8 && oscillation_detector(history, 8)) out.oscillating = true;
        prev = std::move(now);
        },
        false);
    return out;
}

Outcome overconstrained() {
    ScenarioSpec gs = spec_of(ScenarioName::OverconstrainedChain);
    gs.compliance = 0.0;
    ScenarioSpec jacobi = gs;
    jacobi.config.solver_mode = SolverMode::Jacobi;
    ScenarioSpec soft = gs;
    soft.compliance = 1e-6;
    const SettleResult a = settle(gs), b = settle(jacobi), c = settle(soft);
    auto when = [](const SettleResult& s) { return s.converged_at ? *s.converged_at : -1.0; };
    auto settled = [](const SettleResult& s) { return s.converged_at && s.last_delta < 1e-6; };
    return {a.oscillating && settled(b) && settled(c),
            fmt("gs rigid oscillation %d (last delta %.2e); jacobi converged at %.3f s (last %.2e); gs compliance 1e-6 "
                "converged at %.3f s (last %.2e)",
                a.oscillating, a.last_delta, when(b), b.last_delta, when(c), c.last_delta)};
}

// ---- Jacobi / Gauss-Seidel equivalence ---------------------------------------

Scene disjoint_scene(SolverMode mode) {
    Scene s;
    s.config.solver_mode = mode;
    s.config.num_substeps = 10;
    const Material m{};
    for (int i = 0; i < 4; ++i) {
        const double x = 6.0 * i;
        const BodyId anchor = s.add_body(make_static_body(std::nullopt, {x, 10.0, 0.0}));
        const BodyId bob = s.add_body(make_dynamic_body(Box{{0.2, 0.3, 0.4}}, 1.0 + i, {x + 1.5, 10.0, 0.5},
                                                        Quat::from_axis_angle({1, 1, 0}, 0.3 * i), m));
        DistanceConstraint d;
        d.a = {anchor, {}};
        d.b = {bob, {0.2, 0.3, 0.0}};
        d.rest_distance = 1.5;
        d.common.compliance = i % 2 == 0 ? 0.0 : 1e-4;
        s.add_constraint(d);

        const BodyId h1 = s.add_body(make_dynamic_body(Capsule{0.5, 0.1}, 1.0, {x, 20.0, 0.0}));
        const BodyId h2 = s.add_body(make_dynamic_body(Capsule{0.5, 0.1}, 2.0, {x, 20.0, 3.0},
                                                       Quat::from_axis_angle({0, 0, 1}, 0.7)));
        s.bodies[h1].angular_velocity_local = {0.3, 1.0, -0.2};
        HingeConstraint hc;
        hc.a = h1;
        hc.b = h2;
        s.add_constraint(hc);

        const BodyId b1 = s.add_body(make_dynamic_body(Sphere{0.4}, 1.0, {x, 30.0, 0.0}));
        const BodyId b2 = s.add_body(make_dynamic_body(Box{{0.5, 0.2, 0.3}}, 1.5, {x, 30.0, 3.0},
                                                       Quat::from_axis_angle({1, 0, 0}, 1.2)));
        BallJointConstraint bj;
        bj.a = b1;
        bj.b = b2;
        bj.max_angle = 0.3;
        s.add_constraint(bj);
    }
    s.record_initial_energy();
    return s;
}

Outcome jacobi_gs_equivalence() {
    Scene gs = disjoint_scene(SolverMode::GaussSeidel);
    Scene jac = disjoint_scene(SolverMode::Jacobi);
    double worst = 0.0;
    for (int f = 0; f < 120; ++f) {
        step(gs);
        step(jac);
        for (std::size_t i = 0; i < gs.bodies.size(); ++i) {
            const RigidBody &x = gs.bodies[i], &y = jac.bodies[i];
            worst = std::max({worst, length(x.position - y.position), length(x.velocity - y.velocity),
                              length(x.angular_velocity_local - y.angular_velocity_local),
                              std::abs(x.orientation.s - y.orientation.s),
                              length(x.orientation.vec() - y.orientation.vec())});
        }
    }
    return {worst <= 1e-12, fmt("max state difference over 2 s: %.3e", worst)};
}

// ---- determinism -------------------------------------------------------------

int small_size(ScenarioName name) {
    switch (name) {
    case ScenarioName::Chain: return 20;
    case ScenarioName::Stack: return 10;
    case ScenarioName::Pyramid: return 14;
    case ScenarioName::OverlapPyramid: return 14;
    case ScenarioName::CapsulePile: return 30;
    default: return 0;
    }
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream o;
    o << f.rdbuf();
    return o.str();
}

Outcome determinism() {
    const auto dir = std::filesystem::temp_directory_path() / "pbrbd_acceptance_determinism";
    std::filesystem::remove_all(dir);
    std::vector<std::string> bad;
    for (ScenarioName name : all_scenarios()) {
        auto csv = [&](SolverMode mode, bool parallel, const std::string& label) {
            RunManifest m;
            m.spec = spec_of(name, small_size(name));
            m.spec.config.solver_mode = mode;
            m.spec.config.parallel = parallel;
            m.duration = 2.0;
            m.out_dir = dir;
            m.label = std::string(to_string(name)) + "_" + label;
            m.record_timing = false;
            return slurp(*run(m).csv_path);
        };
        if (csv(SolverMode::GaussSeidel, false, "gs1") != csv(SolverMode::GaussSeidel, false, "gs2"))
            bad.push_back(std::string(to_string(name)) + " serial");
        if (csv(SolverMode::Jacobi, false, "jac") != csv(SolverMode::Jacobi, true, "jacpar"))
            bad.push_back(std::string(to_string(name)) + " parallel-jacobi");
    }
    std::string detail = fmt("%zu scenarios x (2 serial GS runs, serial vs parallel Jacobi)", all_scenarios().size());
    for (const auto& b : bad) detail += "; mismatch " + b;
    return {bad.empty(), detail};
}

// ---- scaling -----------------------------------------------------------------

Outcome scaling() {
    RunManifest m;
    m.spec = spec_of(ScenarioName::Chain);
    m.duration = 2.0;
    const SweepResult r = sweep(m, SweepParameter::N, {50, 100, 200, 400});
    std::string pts;
    for (const SweepRow& row : r.rows) pts += fmt(" n=%g:%.4fms", row.value, row.mean_ms_per_substep);
    return {!r.fit.degenerate && r.fit.r2 > 0.95, fmt("R^2 %.4f, slope %.3e ms per link;%s", r.fit.r2, r.fit.slope,
                                                      pts.c_str())};
}

// ---- overlap pyramid ---------------------------------------------------------

Outcome overlap_pyramid() {
    ScenarioSpec spec = spec_of(ScenarioName::OverlapPyramid);
    spec.overlap_depth = 0.4;
    std::vector<Vec3> start;
    std::vector<Vec3> end;
    bool all_finite = true;
    const RunResult r = run_spec(spec, std::nullopt, [&](const Scenario& sc, const MetricsRow& row) {
        if (start.empty()) start = dynamic_positions(sc.scene);
        all_finite = all_finite && std::isfinite(row.total);
        end = dynamic_positions(sc.scene);
    }, false);
    for (const Vec3& p : end) all_finite = all_finite && finite(p);
    std::size_t moved = 0;
    for (std::size_t i = 0; i < end.size(); ++i)
        if (length(end[i] - start[i]) > 0.5 * dims::cube_side) ++moved;
    return {all_finite && r.rows.size() == static_cast<std::size_t>(std::llround(r.summary.duration * 60.0)),
            fmt("no NaN %d; %zu of %zu cubes moved more than half a width (%s); energy %.3fx initial, divergence flag %d",
                all_finite, moved, end.size(), moved > end.size() / 2 ? "structure dismantled" : "structure mostly intact",
                r.summary.final_energy / r.summary.initial_energy, r.summary.diverged)};
}

} // namespace

int main(int argc, char** argv) {
    const std::vector<Criterion> criteria{
        {"gradient suite", 5.0, gradients},
        {"elastic collision", 1.0, elastic_collision},
        {"newton cradle", 60.0, cradle},
        {"triple pendulum", 10.0, triple_pendulum},
        {"chain 100 / chain 500", 300.0, chains},
        {"stack 100 drift", 180.0, stack},
        {"plane-cuboid tumble", 60.0, plane_spin},
        {"friction ramp sphere", 30.0, ramp_sphere},
        {"overconstrained chain", 60.0, overconstrained},
        {"jacobi/gs equivalence", 5.0, jacobi_gs_equivalence},
        {"determinism", 120.0, determinism},
        {"scaling", 600.0, scaling},
        {"overlap pyramid", 600.0, overlap_pyramid},
    };
    std::vector<std::string> filters(argv + 1, argv + argc);
    int failed = 0;
    for (const Criterion& c : criteria) {
        if (!filters.empty() &&
            std::none_of(filters.begin(), filters.end(), [&](const std::string& f) { return c.name.find(f) != std::string::npos; }))
            continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool in_time = secs < c.time_limit_s;
        const bool pass = o.pass && in_time;
        if (!pass) ++failed;
        std::cout << (pass ? "PASS " : "FAIL ") << c.name << ": " << o.detail
                  << fmt(" [%.2f s, limit %.0f s%s]", secs, c.time_limit_s, in_time ? "" : ", too slow") << std::endl;
    }
    return failed == 0 ? 0 : 1;
}
