#include "pbrbd/metrics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace pbrbd {

Energy energy(const Scene& scene) { return scene.energy(); }

Deviation top_body_deviation(const Scene& scene, BodyId tracked, const Vec3& initial) {
    const Vec3 d = scene.bodies.at(tracked).position - initial;
    return {std::sqrt(d.x * d.x + d.z * d.z), std::abs(d.y)};
}

MetricsRow make_row(const Scene& scene, const StepReport& report, const std::optional<BodyId>& tracked,
                    const Vec3& tracked_initial) {
    const Energy e = scene.energy();
    MetricsRow r;
    r.t = scene.time;
    r.potential = e.potential;
    r.kinetic_linear = e.kinetic_linear;
    r.kinetic_rotational = e.kinetic_rotational;
    r.total = e.total();
    if (tracked) {
        const Deviation d = top_body_deviation(scene, *tracked, tracked_initial);
        r.top_body_horizontal_dev = d.horizontal;
        r.top_body_vertical_dev = d.vertical;
    }
    r.ms_per_substep = report.ms_per_substep;
    r.diverged = report.diverged;
    return r;
}

std::vector<Vec3> dynamic_positions(const Scene& scene) {
    std::vector<Vec3> out;
    for (const RigidBody& b : scene.bodies)
        if (!b.is_static()) out.push_back(b.position);
    return out;
}

double max_displacement(std::span<const Vec3> a, std::span<const Vec3> b) {
    if (a.size() != b.size()) throw std::invalid_argument("position sets differ in size");
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, length(a[i] - b[i]));
    return m;
}

bool oscillation_detector(std::span<const std::vector<Vec3>> series, std::size_t window, double min_amplitude,
                          double max_drift) {
    if (window < 4) throw std::invalid_argument("oscillation window must hold at least 4 samples");
    if (series.size() < window) return false;
    const auto w = series.subspan(series.size() - window);
    for (std::size_t i = 0; i + 1 < w.size(); ++i)
        if (!(max_displacement(w[i], w[i + 1]) > min_amplitude)) return false;
    for (std::size_t i = 0; i + 2 < w.size(); ++i)
        if (!(max_displacement(w[i], w[i + 2]) < max_drift)) return false;
    return true;
}

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string csv_line(const MetricsRow& r) {
    std::string s;
    for (double v : {r.t, r.potential, r.kinetic_linear, r.kinetic_rotational, r.total, r.top_body_horizontal_dev,
                     r.top_body_vertical_dev, r.ms_per_substep}) {
        s += format_double(v);
        s += ',';
    }
    s += r.diverged ? '1' : '0';
    return s;
}

void write_csv(std::span<const MetricsRow> rows, const std::filesystem::path& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    f << kCsvHeader << '\n';
    for (const MetricsRow& r : rows) f << csv_line(r) << '\n';
    f.flush();
    if (!f) throw std::runtime_error("write failed for '" + path.string() + "'");
}

std::vector<MetricsRow> read_csv(const std::filesystem::path& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open '" + path.string() + "' for reading");
    std::string line;
    if (!std::getline(f, line) || line != kCsvHeader)
        throw std::runtime_error("'" + path.string() + "' does not start with the metrics header");
    std::vector<MetricsRow> rows;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string cell;
        std::vector<double> v;
        while (std::getline(ss, cell, ',')) v.push_back(std::stod(cell));
        if (v.size() != 9) throw std::runtime_error("malformed row in '" + path.string() + "': " + line);
        rows.push_back({v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7], v[8] != 0.0});
    }
    return rows;
}

} // namespace pbrbd
