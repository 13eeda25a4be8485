#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "pbrbd/engine.hpp"

namespace pbrbd {

enum class ScenarioName {
    Cradle,
    TriplePendulum,
    Chain,
    Stack,
    Pyramid,
    RodSpin,
    PlaneSpin,
    RampCube,
    RampSphere,
    OverlapPyramid,
    OverconstrainedChain,
    CapsulePile,
    SoftbodyTetra,
    DragAnchor,
};

class UnknownScenario : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class InvalidSize : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

const char* to_string(ScenarioName name);
/// Throws UnknownScenario.
ScenarioName parse_scenario(std::string_view text);
const std::vector<ScenarioName>& all_scenarios();

/// Fixed dimensions shared by every builder.
namespace dims {
inline constexpr double cube_side = 1.0;
inline constexpr double sphere_radius = 0.5;
inline constexpr double capsule_half_length = 0.5;
inline constexpr double capsule_radius = 0.1;
inline constexpr double ramp_incline_deg = 30.0;
inline constexpr double heavy_sphere_mass_ratio = 20.0;
inline constexpr double cradle_wire = 2.0;
inline constexpr double cradle_release_deg = 30.0;
inline constexpr double pyramid_gap = 0.05;
inline constexpr double overconstrained_stretch = 1.2;
} // namespace dims

struct MaterialOverride {
    std::optional<double> restitution;
    std::optional<double> static_friction;
    std::optional<double> dynamic_friction;
    void apply(Material& m) const;
    bool empty() const { return !restitution && !static_friction && !dynamic_friction; }
};

struct ConfigOverrides {
    std::optional<double> frame_dt;
    std::optional<int> num_substeps;
    std::optional<int> iterations_per_substep;
    std::optional<SolverMode> solver_mode;
    std::optional<double> jacobi_relaxation;
    std::optional<bool> parallel;
    std::optional<double> slop;
    std::optional<double> restitution_cutoff;
    std::optional<double> divergence_energy_factor;
    void apply(SolverConfig& c) const;
};

struct ScenarioSpec {
    ScenarioName name = ScenarioName::Cradle;
    /// Element count; 0 picks the scenario default.
    int n = 0;
    MaterialOverride material;
    ConfigOverrides config;
    /// Compliance of the scenario's joints (chains, pendulum, soft body).
    std::optional<double> compliance;
    /// Initial layer overlap for overlap_pyramid.
    double overlap_depth = 0.4;
    std::uint64_t seed = 0;
};

struct Scenario {
    ScenarioName name;
    int n = 0;
    Scene scene;
    /// Body whose drift is reported (stack and pyramid tops, ramp body).
    std::optional<BodyId> tracked;
    /// Scenario-specific bodies of interest, in a documented order:
    /// cradle spheres left to right, chain links then the heavy sphere,
    /// ramp then the body on it.
    std::vector<BodyId> focus;
    double default_duration = 10.0;
};

int default_size(ScenarioName name);
int minimum_size(ScenarioName name);

/// Deterministic scene for a spec. Throws InvalidSize when n is below the
/// scenario minimum (or, for pyramids, not a square-pyramidal number).
Scenario build(const ScenarioSpec& spec);

/// Largest L with L(L+1)(2L+1)/6 == n, or nullopt.
std::optional<int> pyramid_layers(int n);

} // namespace pbrbd
