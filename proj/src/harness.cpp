#include "pbrbd/harness.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include <json.hpp>

namespace pbrbd {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
    std::size_t used = 0;
    double d = 0.0;
    try {
        d = std::stod(v, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != v.size() || !std::isfinite(d)) throw InvalidConfig(key + ": expected a number, got '" + v + "'");
    return d;
}

int to_int(const std::string& key, const std::string& v) {
    const double d = to_double(key, v);
    if (d != std::floor(d) || std::abs(d) > std::numeric_limits<int>::max())
        throw InvalidConfig(key + ": expected an integer, got '" + v + "'");
    return static_cast<int>(d);
}

bool is_default(const std::string& v) { return v == "default"; }

std::optional<double> to_optional_double(const std::string& key, const std::string& v) {
    if (is_default(v)) return std::nullopt;
    return to_double(key, v);
}

bool to_bool(const std::string& key, const std::string& v) {
    if (v == "1" || v == "true" || v == "on" || v == "yes") return true;
    if (v == "0" || v == "false" || v == "off" || v == "no") return false;
    throw InvalidConfig(key + ": expected a boolean, got '" + v + "'");
}

} // namespace

SolverMode parse_solver(const std::string& text) {
    if (text == "gs" || text == "gauss-seidel" || text == "gauss_seidel") return SolverMode::GaussSeidel;
    if (text == "jacobi") return SolverMode::Jacobi;
    throw InvalidConfig("solver must be gs or jacobi, got '" + text + "'");
}

const char* to_string(SolverMode mode) { return mode == SolverMode::Jacobi ? "jacobi" : "gs"; }

std::string to_json(const RunSummary& s) {
    nlohmann::ordered_json j;
    j["scenario"] = s.scenario;
    j["n"] = s.n;
    j["solver"] = s.solver;
    j["substeps"] = s.substeps;
    j["iterations"] = s.iterations;
    j["parallel"] = s.parallel;
    j["duration"] = s.duration;
    j["frames"] = s.frames;
    j["initial_energy"] = s.initial_energy;
    j["final_energy"] = s.final_energy;
    j["min_energy"] = s.min_energy;
    j["max_energy"] = s.max_energy;
    j["max_dev_h"] = s.max_dev_h;
    j["max_dev_v"] = s.max_dev_v;
    j["diverged"] = s.diverged;
    j["mean_ms_per_substep"] = s.mean_ms_per_substep;
    return j.dump(2);
}

RunSummary summarize(std::span<const MetricsRow> rows, double initial_energy) {
    RunSummary s;
    s.initial_energy = initial_energy;
    s.frames = rows.size();
    s.min_energy = s.max_energy = s.final_energy = initial_energy;
    double ms = 0.0;
    for (const MetricsRow& r : rows) {
        s.min_energy = std::min(s.min_energy, r.total);
        s.max_energy = std::max(s.max_energy, r.total);
        s.max_dev_h = std::max(s.max_dev_h, r.top_body_horizontal_dev);
        s.max_dev_v = std::max(s.max_dev_v, r.top_body_vertical_dev);
        s.diverged = s.diverged || r.diverged;
        ms += r.ms_per_substep;
    }
    if (!rows.empty()) {
        s.final_energy = rows.back().total;
        s.mean_ms_per_substep = ms / static_cast<double>(rows.size());
    }
    return s;
}

RunResult run(const RunManifest& manifest, const FrameObserver& observer) {
    Scenario sc = build(manifest.spec);
    Scene& scene = sc.scene;
    const double duration = manifest.duration.value_or(sc.default_duration);
    if (!(duration > 0.0)) throw InvalidConfig("duration must be positive");
    const auto frames = static_cast<std::size_t>(std::llround(duration / scene.config.frame_dt));
    const Vec3 tracked_initial = sc.tracked ? scene.bodies[*sc.tracked].position : Vec3{};

    RunResult result;
    result.rows.reserve(frames);
    for (std::size_t f = 0; f < frames; ++f) {
        const StepReport report = step(scene);
        result.rows.push_back(make_row(scene, report, sc.tracked, tracked_initial));
        if (!manifest.record_timing) result.rows.back().ms_per_substep = 0.0;
        if (observer) observer(sc, result.rows.back());
        if (report.diverged && manifest.stop_on_divergence) break;
    }

    RunSummary& s = result.summary;
    s = summarize(result.rows, *scene.initial_energy);
    s.scenario = to_string(sc.name);
    s.n = sc.n;
    s.solver = to_string(scene.config.solver_mode);
    s.substeps = scene.config.num_substeps;
    s.iterations = scene.config.iterations_per_substep;
    s.parallel = scene.config.parallel;
    s.duration = duration;

    if (manifest.out_dir) {
        std::filesystem::create_directories(*manifest.out_dir);
        const std::string stem = manifest.label.empty() ? std::string(to_string(sc.name)) : manifest.label;
        result.csv_path = *manifest.out_dir / (stem + ".csv");
        result.summary_path = *manifest.out_dir / (stem + ".json");
        write_csv(result.rows, *result.csv_path);
        std::ofstream f(*result.summary_path);
        if (!f) throw std::runtime_error("cannot open '" + result.summary_path->string() + "' for writing");
        f << to_json(s) << '\n';
    }
    return result;
}

LinearFit fit_line(std::span<const double> x, std::span<const double> y) {
    LinearFit fit;
    if (x.size() != y.size()) throw std::invalid_argument("fit_line: x and y differ in length");
    const std::set<double> distinct(x.begin(), x.end());
    if (distinct.size() < 2) {
        fit.degenerate = true;
        if (!y.empty()) fit.intercept = y[0];
        return fit;
    }
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ss_res = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - (fit.slope * x[i] + fit.intercept);
        ss_res += r * r;
    }
    fit.r2 = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
    return fit;
}

SweepParameter parse_sweep_parameter(const std::string& text) {
    if (text == "n") return SweepParameter::N;
    if (text == "substeps") return SweepParameter::Substeps;
    throw InvalidConfig("sweep parameter must be n or substeps, got '" + text + "'");
}

std::string to_json(const LinearFit& fit) {
    nlohmann::ordered_json j;
    j["slope"] = fit.slope;
    j["intercept"] = fit.intercept;
    j["r2"] = fit.r2;
    j["degenerate"] = fit.degenerate;
    return j.dump(2);
}

SweepResult sweep(const RunManifest& base, SweepParameter parameter, const std::vector<double>& values) {
    if (values.empty()) throw InvalidConfig("sweep needs at least one value");
    SweepResult out;
    const std::string pname = parameter == SweepParameter::N ? "n" : "substeps";
    for (double v : values) {
        RunManifest m = base;
        const int iv = to_int(pname, format_double(v));
        if (parameter == SweepParameter::N)
            m.spec.n = iv;
        else
            m.spec.config.num_substeps = iv;
        const std::string stem = base.label.empty() ? std::string(to_string(base.spec.name)) : base.label;
        m.label = stem + "_" + pname + "_" + std::to_string(iv);
        const RunResult r = run(m);
        SweepRow row;
        row.value = v;
        row.mean_ms_per_substep = r.summary.mean_ms_per_substep;
        const double e0 = r.summary.initial_energy;
        row.energy_drift = e0 != 0.0 ? (r.summary.final_energy - e0) / std::abs(e0) : r.summary.final_energy;
        row.diverged = r.summary.diverged;
        out.rows.push_back(row);
    }
    std::vector<double> x, y;
    for (const SweepRow& r : out.rows) {
        x.push_back(r.value);
        y.push_back(r.mean_ms_per_substep);
    }
    out.fit = fit_line(x, y);

    if (base.out_dir) {
        std::filesystem::create_directories(*base.out_dir);
        const std::string stem = base.label.empty() ? std::string(to_string(base.spec.name)) : base.label;
        out.table_path = *base.out_dir / (stem + "_sweep_" + pname + ".csv");
        std::ofstream f(*out.table_path);
        if (!f) throw std::runtime_error("cannot open '" + out.table_path->string() + "' for writing");
        f << pname << ",mean_ms_substep,energy_drift,diverged\n";
        for (const SweepRow& r : out.rows)
            f << format_double(r.value) << ',' << format_double(r.mean_ms_per_substep) << ','
              << format_double(r.energy_drift) << ',' << (r.diverged ? 1 : 0) << '\n';
        std::ofstream fit(*base.out_dir / (stem + "_sweep_" + pname + "_fit.json"));
        fit << to_json(out.fit) << '\n';
    }
    return out;
}

void apply_config_entry(const std::string& key, const std::string& value, RunManifest& m) {
    ScenarioSpec& s = m.spec;
    ConfigOverrides& c = s.config;
    if (key == "scenario") {
        try {
            s.name = parse_scenario(value);
        } catch (const UnknownScenario& e) {
            throw InvalidConfig(e.what());
        }
    } else if (key == "n") {
        s.n = to_int(key, value);
    } else if (key == "duration") {
        m.duration = to_double(key, value);
    } else if (key == "seed") {
        s.seed = static_cast<std::uint64_t>(to_int(key, value));
    } else if (key == "out") {
        if (value.empty())
            m.out_dir.reset();
        else
            m.out_dir = value;
    } else if (key == "label") {
        m.label = value;
    } else if (key == "timing") {
        m.record_timing = to_bool(key, value);
    } else if (key == "stop_on_divergence") {
        m.stop_on_divergence = to_bool(key, value);
    } else if (key == "compliance") {
        s.compliance = to_optional_double(key, value);
    } else if (key == "overlap_depth") {
        s.overlap_depth = to_double(key, value);
    } else if (key == "restitution") {
        s.material.restitution = to_optional_double(key, value);
    } else if (key == "static_friction") {
        s.material.static_friction = to_optional_double(key, value);
    } else if (key == "dynamic_friction") {
        s.material.dynamic_friction = to_optional_double(key, value);
    } else if (key == "frame_dt") {
        c.frame_dt = to_double(key, value);
    } else if (key == "substeps") {
        c.num_substeps = to_int(key, value);
    } else if (key == "iterations") {
        c.iterations_per_substep = to_int(key, value);
    } else if (key == "solver") {
        c.solver_mode = parse_solver(value);
    } else if (key == "jacobi_relaxation") {
        c.jacobi_relaxation = to_double(key, value);
    } else if (key == "parallel") {
        c.parallel = to_bool(key, value);
    } else if (key == "slop") {
        c.slop = to_double(key, value);
    } else if (key == "restitution_cutoff") {
        c.restitution_cutoff = to_optional_double(key, value);
    } else if (key == "divergence_energy_factor") {
        c.divergence_energy_factor = to_double(key, value);
    } else {
        throw InvalidConfig("unknown key '" + key + "'");
    }
}

void load_config_file(const std::filesystem::path& path, RunManifest& manifest) {
    std::ifstream f(path);
    if (!f) throw InvalidConfig("cannot read config file '" + path.string() + "'");
    std::string line;
    int number = 0;
    while (std::getline(f, line)) {
        ++number;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw InvalidConfig(path.string() + ":" + std::to_string(number) + ": expected key = value");
        try {
            apply_config_entry(trim(line.substr(0, eq)), trim(line.substr(eq + 1)), manifest);
        } catch (const InvalidConfig& e) {
            throw InvalidConfig(path.string() + ":" + std::to_string(number) + ": " + e.what());
        }
    }
}

std::string describe_config(const RunManifest& m) {
    const Scenario sc = build(m.spec);
    const SolverConfig& c = sc.scene.config;
    const auto opt = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string("default"); };
    std::ostringstream o;
    o << "scenario = " << to_string(sc.name) << '\n'
      << "n = " << sc.n << '\n'
      << "duration = " << format_double(m.duration.value_or(sc.default_duration)) << '\n'
      << "seed = " << m.spec.seed << '\n'
      << "out = " << (m.out_dir ? m.out_dir->string() : std::string()) << '\n'
      << "label = " << m.label << '\n'
      << "timing = " << (m.record_timing ? "true" : "false") << '\n'
      << "stop_on_divergence = " << (m.stop_on_divergence ? "true" : "false") << '\n'
      << "compliance = " << opt(m.spec.compliance) << '\n'
      << "overlap_depth = " << format_double(m.spec.overlap_depth) << '\n'
      << "restitution = " << opt(m.spec.material.restitution) << '\n'
      << "static_friction = " << opt(m.spec.material.static_friction) << '\n'
      << "dynamic_friction = " << opt(m.spec.material.dynamic_friction) << '\n'
      << "frame_dt = " << format_double(c.frame_dt) << '\n'
      << "substeps = " << c.num_substeps << '\n'
      << "iterations = " << c.iterations_per_substep << '\n'
      << "solver = " << to_string(c.solver_mode) << '\n'
      << "jacobi_relaxation = " << format_double(c.jacobi_relaxation) << '\n'
      << "parallel = " << (c.parallel ? "true" : "false") << '\n'
      << "slop = " << format_double(c.slop) << '\n'
      << "restitution_cutoff = " << opt(m.spec.config.restitution_cutoff) << "  # effective "
      << format_double(c.effective_restitution_cutoff()) << '\n'
      << "divergence_energy_factor = " << format_double(c.divergence_energy_factor) << '\n';
    return o.str();
}

} // namespace pbrbd
