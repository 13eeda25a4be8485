#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "pbrbd/engine.hpp"

namespace pbrbd {

struct MetricsRow {
    double t = 0.0;
    double potential = 0.0;
    double kinetic_linear = 0.0;
    double kinetic_rotational = 0.0;
    double total = 0.0;
    double top_body_horizontal_dev = 0.0;
    double top_body_vertical_dev = 0.0;
    double ms_per_substep = 0.0;
    bool diverged = false;
};

inline constexpr const char* kCsvHeader = "t,pe,ke_lin,ke_rot,total,dev_h,dev_v,ms_substep,diverged";

Energy energy(const Scene& scene);

struct Deviation {
    double horizontal = 0.0;
    double vertical = 0.0;
};
/// Planar (x, z) distance and |dy| between the body's position and `initial`.
Deviation top_body_deviation(const Scene& scene, BodyId tracked, const Vec3& initial);

/// Row for the scene's current state. Deviation columns stay 0 without a tracked body.
MetricsRow make_row(const Scene& scene, const StepReport& report, const std::optional<BodyId>& tracked,
                    const Vec3& tracked_initial);

/// Positions of every dynamic body, in body order.
std::vector<Vec3> dynamic_positions(const Scene& scene);

/// Largest per-body distance between two equally sized position sets.
double max_displacement(std::span<const Vec3> a, std::span<const Vec3> b);

/// Period-2 alternation over the last `window` samples: every consecutive pair
/// differs by more than `min_amplitude` while samples two apart differ by less
/// than `max_drift`. Throws std::invalid_argument for window < 4.
bool oscillation_detector(std::span<const std::vector<Vec3>> series, std::size_t window,
                          double min_amplitude = 1e-3, double max_drift = 1e-5);

/// Shortest round-trip decimal form.
std::string format_double(double v);
std::string csv_line(const MetricsRow& row);

/// Header plus one line per row. Throws std::runtime_error naming the path on I/O failure.
void write_csv(std::span<const MetricsRow> rows, const std::filesystem::path& path);
std::vector<MetricsRow> read_csv(const std::filesystem::path& path);

} // namespace pbrbd
