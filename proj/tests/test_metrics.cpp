#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "pbrbd/metrics.hpp"
#include "pbrbd/scenarios.hpp"

using namespace pbrbd;

namespace {

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::filesystem::path scratch(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / "pbrbd_test_metrics";
    std::filesystem::create_directories(dir);
    return dir / name;
}

std::vector<std::vector<Vec3>> series_of(std::initializer_list<double> xs) {
    std::vector<std::vector<Vec3>> out;
    for (double x : xs) out.push_back({Vec3{x, 1.0, 0.0}, Vec3{0.0, 0.0, 0.0}});
    return out;
}

} // namespace

TEST_CASE("energy examples") {
    Scene s;
    s.add_body(make_static_body(HalfSpace{}, {}));
    s.add_body(make_dynamic_body(Sphere{0.5}, 2.0, {0, 3, 0}));
    const Energy e = energy(s);
    CHECK(e.potential == doctest::Approx(58.86).epsilon(1e-12));
    CHECK(e.kinetic_linear == 0.0);
    CHECK(e.kinetic_rotational == 0.0);

    RigidBody spinner = make_dynamic_body(Sphere{0.5}, 1.0, {});
    spinner.inertia_body = Mat3::diagonal({1, 2, 3});
    spinner.inverse_inertia_body = invert_spd(spinner.inertia_body);
    spinner.angular_velocity_local = {1, 0, 0};
    Scene r;
    r.add_body(spinner);
    CHECK(energy(r).kinetic_rotational == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("energy decomposition sums to the total") {
    ScenarioSpec spec;
    spec.name = ScenarioName::Chain;
    spec.n = 20;
    Scenario sc = build(spec);
    for (int f = 0; f < 30; ++f) {
        const MetricsRow row = make_row(sc.scene, step(sc.scene), std::nullopt, {});
        CHECK(std::abs(row.total - (row.potential + row.kinetic_linear + row.kinetic_rotational)) <= 1e-12);
    }
}

TEST_CASE("free fall keeps its energy") {
    Scene s;
    s.config.num_substeps = 20;
    s.add_body(make_dynamic_body(Sphere{0.5}, 1.0, {0, 10, 0}));
    const double e0 = energy(s).total();
    for (int f = 0; f < 60; ++f) {
        step(s);
        CHECK(std::abs(energy(s).total() - e0) <= 0.005 * std::abs(e0));
    }
}

TEST_CASE("energy under a rigid translation") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    ScenarioSpec spec;
    spec.name = ScenarioName::CapsulePile;
    spec.n = 12;
    Scenario sc = build(spec);
    for (int f = 0; f < 20; ++f) step(sc.scene);
    const Energy before = energy(sc.scene);
    double weight = 0.0;
    for (const RigidBody& b : sc.scene.bodies)
        if (!b.is_static()) weight += b.mass() * 9.81;

    Scene level = sc.scene;
    const Vec3 flat{u(rng), 0.0, u(rng)};
    for (RigidBody& b : level.bodies) b.position += flat;
    const Energy e_level = energy(level);
    CHECK(e_level.kinetic_linear == before.kinetic_linear);
    CHECK(e_level.kinetic_rotational == before.kinetic_rotational);
    CHECK(e_level.potential == doctest::Approx(before.potential).epsilon(1e-14));

    Scene raised = sc.scene;
    const Vec3 up{u(rng), 1.75, u(rng)};
    for (RigidBody& b : raised.bodies) b.position += up;
    const Energy e_raised = energy(raised);
    CHECK(e_raised.kinetic_linear == before.kinetic_linear);
    CHECK(e_raised.potential == doctest::Approx(before.potential + up.y * weight).epsilon(1e-12));
}

TEST_CASE("top body deviation") {
    Scene s;
    s.add_body(make_dynamic_body(Box{}, 1.0, {0, 1, 0}));
    const Vec3 start{0, 1, 0};
    auto dev = [&](const Vec3& p) {
        s.bodies[0].position = p;
        return top_body_deviation(s, 0, start);
    };
    Deviation d = dev(start);
    CHECK(d.horizontal == 0.0);
    CHECK(d.vertical == 0.0);
    d = dev(start + Vec3{1, 0, 0});
    CHECK(d.horizontal == doctest::Approx(1.0));
    CHECK(d.vertical == 0.0);
    d = dev(start + Vec3{3, 4, 0});
    CHECK(d.horizontal == doctest::Approx(3.0));
    CHECK(d.vertical == doctest::Approx(4.0));
    d = dev(start + Vec3{3, -2, 4});
    CHECK(d.horizontal == doctest::Approx(5.0));
    CHECK(d.vertical == doctest::Approx(2.0));
}

TEST_CASE("oscillation detector") {
    CHECK_FALSE(oscillation_detector(series_of({1, 1, 1, 1, 1, 1}), 6));
    CHECK_FALSE(oscillation_detector(series_of({1, 0.5, 0.25, 0.125, 0.0625, 0.03125}), 6));
    CHECK(oscillation_detector(series_of({0, 0.01, 0, 0.01, 0, 0.01, 0, 0.01}), 8));
    CHECK_FALSE(oscillation_detector(series_of({0, 0.0005, 0, 0.0005, 0, 0.0005}), 6));
    CHECK_FALSE(oscillation_detector(series_of({0, 0.01, 0.001, 0.011, 0.002, 0.012}), 6));
    CHECK_FALSE(oscillation_detector(series_of({0, 0.01, 0}), 4));
    CHECK_THROWS_AS(oscillation_detector(series_of({0, 0.01, 0}), 3), std::invalid_argument);
}

TEST_CASE("csv output") {
    SUBCASE("header only") {
        const auto p = scratch("empty.csv");
        write_csv({}, p);
        CHECK(slurp(p) == std::string(kCsvHeader) + "\n");
        CHECK(read_csv(p).empty());
    }
    SUBCASE("one row") {
        MetricsRow row;
        row.t = 1.0 / 60.0;
        row.potential = 58.86;
        row.kinetic_linear = 0.1;
        row.kinetic_rotational = 1e-300;
        row.total = row.potential + row.kinetic_linear + row.kinetic_rotational;
        row.top_body_vertical_dev = -0.0;
        row.ms_per_substep = 0.125;
        row.diverged = true;
        const auto p = scratch("one.csv");
        const std::vector<MetricsRow> rows{row};
        write_csv(rows, p);
        const std::string text = slurp(p);
        CHECK(std::count(text.begin(), text.end(), '\n') == 2);
        const auto back = read_csv(p);
        REQUIRE(back.size() == 1);
        CHECK(back[0].t == row.t);
        CHECK(back[0].potential == row.potential);
        CHECK(back[0].kinetic_rotational == row.kinetic_rotational);
        CHECK(back[0].total == row.total);
        CHECK(back[0].ms_per_substep == row.ms_per_substep);
        CHECK(back[0].diverged);
    }
    SUBCASE("round trip of random values") {
        std::mt19937_64 rng(9);
        std::uniform_real_distribution<double> u(-1e6, 1e6);
        std::vector<MetricsRow> rows(50);
        for (MetricsRow& r : rows) {
            r.t = u(rng);
            r.potential = u(rng) * 1e-9;
            r.total = u(rng);
            r.top_body_horizontal_dev = std::nextafter(u(rng), 0.0);
        }
        const auto p = scratch("random.csv");
        write_csv(rows, p);
        const auto back = read_csv(p);
        REQUIRE(back.size() == rows.size());
        for (std::size_t i = 0; i < rows.size(); ++i) {
            CHECK(back[i].t == rows[i].t);
            CHECK(back[i].potential == rows[i].potential);
            CHECK(back[i].total == rows[i].total);
            CHECK(back[i].top_body_horizontal_dev == rows[i].top_body_horizontal_dev);
        }
    }
    SUBCASE("deterministic reruns are byte-identical") {
        auto simulate = [](const std::filesystem::path& p) {
            ScenarioSpec spec;
            spec.name = ScenarioName::Stack;
            spec.n = 5;
            Scenario sc = build(spec);
            const Vec3 start = sc.scene.bodies[*sc.tracked].position;
            std::vector<MetricsRow> rows;
            for (int f = 0; f < 60; ++f) {
                StepReport r = step(sc.scene);
                r.ms_per_substep = 0.0;
                rows.push_back(make_row(sc.scene, r, sc.tracked, start));
            }
            write_csv(rows, p);
        };
        simulate(scratch("a.csv"));
        simulate(scratch("b.csv"));
        CHECK(slurp(scratch("a.csv")) == slurp(scratch("b.csv")));
    }
    SUBCASE("unwritable path") {
        CHECK_THROWS_WITH_AS(write_csv({}, "/nonexistent-dir/x.csv"), doctest::Contains("/nonexistent-dir/x.csv"),
                             std::runtime_error);
    }
}
