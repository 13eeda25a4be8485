#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pbrbd/harness.hpp"

namespace {

struct Flags {
    std::string config;
    std::string scenario;
    std::optional<int> n;
    std::optional<double> duration;
    std::optional<int> substeps;
    std::optional<int> iterations;
    std::optional<std::string> solver;
    bool parallel = false;
    std::optional<std::string> out;
    std::optional<long long> seed;
    bool no_timing = false;
};

void add_common(CLI::App* cmd, Flags& f) {
    cmd->add_option("scenario,--scenario", f.scenario, "Scenario name (see list-scenarios)");
    cmd->add_option("--config", f.config, "Flat key = value config file; flags override it");
    cmd->add_option("--n", f.n, "Element count");
    cmd->add_option("--duration", f.duration, "Simulated seconds");
    cmd->add_option("--substeps", f.substeps, "Substeps per frame");
    cmd->add_option("--iterations", f.iterations, "Solver iterations per substep");
    cmd->add_option("--solver", f.solver, "gs or jacobi");
    cmd->add_flag("--parallel", f.parallel, "Run kernels with OpenMP");
    cmd->add_option("--out", f.out, "Output directory");
    cmd->add_option("--seed", f.seed, "Scenario jitter seed");
    cmd->add_flag("--no-timing", f.no_timing, "Write 0 in the ms_substep column (byte-comparable CSVs)");
}

pbrbd::RunManifest manifest_from(const Flags& f) {
    pbrbd::RunManifest m;
    if (!f.config.empty()) pbrbd::load_config_file(f.config, m);
    if (!f.scenario.empty()) pbrbd::apply_config_entry("scenario", f.scenario, m);
    if (f.n) m.spec.n = *f.n;
    if (f.duration) m.duration = *f.duration;
    if (f.substeps) m.spec.config.num_substeps = *f.substeps;
    if (f.iterations) m.spec.config.iterations_per_substep = *f.iterations;
    if (f.solver) m.spec.config.solver_mode = pbrbd::parse_solver(*f.solver);
    if (f.parallel) m.spec.config.parallel = true;
    if (f.out) m.out_dir = *f.out;
    if (f.seed) m.spec.seed = static_cast<std::uint64_t>(*f.seed);
    if (f.no_timing) m.record_timing = false;
    return m;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Position-based rigid body dynamics benchmark harness"};
    app.require_subcommand(1);

    Flags run_flags;
    auto* run_cmd = app.add_subcommand("run", "Simulate one scenario, write metrics CSV and a JSON summary");
    add_common(run_cmd, run_flags);

    Flags sweep_flags;
    std::string parameter = "n";
    std::vector<double> values;
    auto* sweep_cmd = app.add_subcommand("sweep", "Run once per value and fit ms/substep against it");
    add_common(sweep_cmd, sweep_flags);
    sweep_cmd->add_option("--parameter", parameter, "n or substeps");
    sweep_cmd->add_option("--values", values, "Values to sweep")->required()->delimiter(',');

    app.add_subcommand("list-scenarios", "Print scenario names with default sizes");

    Flags print_flags;
    auto* print_cmd = app.add_subcommand("print-config", "Print every config key with its effective value");
    add_common(print_cmd, print_flags);

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand("list-scenarios")) {
            for (auto name : pbrbd::all_scenarios())
                std::cout << pbrbd::to_string(name) << " (default n = " << pbrbd::default_size(name) << ")\n";
            return 0;
        }
        if (app.got_subcommand(print_cmd)) {
            std::cout << pbrbd::describe_config(manifest_from(print_flags));
            return 0;
        }
        if (app.got_subcommand(run_cmd)) {
            const pbrbd::RunResult r = pbrbd::run(manifest_from(run_flags));
            std::cout << pbrbd::to_json(r.summary) << '\n';
            return 0;
        }
        if (app.got_subcommand(sweep_cmd)) {
            const pbrbd::SweepResult r =
                pbrbd::sweep(manifest_from(sweep_flags), pbrbd::parse_sweep_parameter(parameter), values);
            std::cout << parameter << ",mean_ms_substep,energy_drift,diverged\n";
            for (const auto& row : r.rows)
                std::cout << pbrbd::format_double(row.value) << ',' << pbrbd::format_double(row.mean_ms_per_substep)
                          << ',' << pbrbd::format_double(row.energy_drift) << ',' << (row.diverged ? 1 : 0) << '\n';
            std::cout << pbrbd::to_json(r.fit) << '\n';
            if (r.fit.degenerate) std::cout << "fit is degenerate: fewer than two distinct values\n";
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
