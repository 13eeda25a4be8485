#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "pbrbd/metrics.hpp"
#include "pbrbd/scenarios.hpp"

namespace pbrbd {

struct RunManifest {
    ScenarioSpec spec;
    /// Simulated seconds; unset uses the scenario default.
    std::optional<double> duration;
    /// Directory for CSV and summary output; nothing is written when unset.
    std::optional<std::filesystem::path> out_dir;
    /// File stem for outputs; defaults to the scenario name.
    std::string label;
    /// When false the ms_substep column is written as 0 so reruns compare byte for byte.
    bool record_timing = true;
    /// When false a diverged run keeps stepping to the full duration (still flagged).
    bool stop_on_divergence = true;
};

struct RunSummary {
    std::string scenario;
    int n = 0;
    std::string solver;
    int substeps = 0;
    int iterations = 0;
    bool parallel = false;
    double duration = 0.0;
    std::size_t frames = 0;
    double initial_energy = 0.0;
    double final_energy = 0.0;
    double min_energy = 0.0;
    double max_energy = 0.0;
    double max_dev_h = 0.0;
    double max_dev_v = 0.0;
    bool diverged = false;
    double mean_ms_per_substep = 0.0;
};

std::string to_json(const RunSummary& s);
/// Summary fields recomputed from metrics rows (energy, deviation, timing, divergence).
RunSummary summarize(std::span<const MetricsRow> rows, double initial_energy);

struct RunResult {
    RunSummary summary;
    std::vector<MetricsRow> rows;
    std::optional<std::filesystem::path> csv_path;
    std::optional<std::filesystem::path> summary_path;
};

/// Called after every frame with the live scenario and that frame's row.
using FrameObserver = std::function<void(const Scenario&, const MetricsRow&)>;

/// Simulates duration / frame_dt frames (stopping early on divergence unless disabled),
/// records one row per frame and writes outputs when out_dir is set.
RunResult run(const RunManifest& manifest, const FrameObserver& observer = {});

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
    bool degenerate = false;
};
/// Ordinary least squares y = slope x + intercept. Degenerate with fewer than
/// two distinct x values.
LinearFit fit_line(std::span<const double> x, std::span<const double> y);

enum class SweepParameter { N, Substeps };
SweepParameter parse_sweep_parameter(const std::string& text);

struct SweepRow {
    double value = 0.0;
    double mean_ms_per_substep = 0.0;
    double energy_drift = 0.0;
    bool diverged = false;
};

struct SweepResult {
    std::vector<SweepRow> rows;
    LinearFit fit;
    std::optional<std::filesystem::path> table_path;
};

std::string to_json(const LinearFit& fit);

/// One run per value; the fit is mean ms/substep against the swept value.
SweepResult sweep(const RunManifest& base, SweepParameter parameter, const std::vector<double>& values);

/// Reads a flat `key = value` file ('#' starts a comment) into `manifest`.
/// Throws InvalidConfig naming the file, line and key on bad input.
void load_config_file(const std::filesystem::path& path, RunManifest& manifest);
void apply_config_entry(const std::string& key, const std::string& value, RunManifest& manifest);

/// Every key with its effective value for the manifest, one `key = value` per line.
std::string describe_config(const RunManifest& manifest);

SolverMode parse_solver(const std::string& text);
const char* to_string(SolverMode mode);

} // namespace pbrbd
