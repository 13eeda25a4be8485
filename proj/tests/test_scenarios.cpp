#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <variant>

#include "pbrbd/collision.hpp"
#include "pbrbd/scenarios.hpp"

using namespace pbrbd;

namespace {

Scenario make(ScenarioName name, int n = 0) {
    ScenarioSpec spec;
    spec.name = name;
    spec.n = n;
    return build(spec);
}

double deepest_overlap(const Scene& s) {
    double deepest = 0.0;
    for (BodyId i = 0; i < s.bodies.size(); ++i)
        for (BodyId j = i + 1; j < s.bodies.size(); ++j) {
            if (!may_collide(s.bodies[i], s.bodies[j], i, j, s.filter)) continue;
            for (const Contact& c : narrow_phase(s.bodies[i], i, s.bodies[j], j, 0.0))
                deepest = std::max(deepest, c.depth);
        }
    return deepest;
}

bool same_bits(const RigidBody& a, const RigidBody& b) {
    auto eq = [](const auto& x, const auto& y) { return std::memcmp(&x, &y, sizeof(x)) == 0; };
    return eq(a.position, b.position) && eq(a.orientation, b.orientation) && eq(a.velocity, b.velocity) &&
           eq(a.angular_velocity_local, b.angular_velocity_local) && eq(a.inverse_mass, b.inverse_mass) &&
           eq(a.inertia_body, b.inertia_body) && a.collider.has_value() == b.collider.has_value();
}

} // namespace

TEST_CASE("cradle of four") {
    const Scenario sc = make(ScenarioName::Cradle, 4);
    const Scene& s = sc.scene;
    int anchors = 0, spheres = 0;
    for (const RigidBody& b : s.bodies) {
        if (b.is_static()) {
            ++anchors;
            CHECK_FALSE(b.collider.has_value());
        } else {
            ++spheres;
            CHECK(b.mass() == doctest::Approx(1.0));
            REQUIRE(b.collider.has_value());
            CHECK(std::holds_alternative<Sphere>(*b.collider));
        }
    }
    CHECK(anchors == 4);
    CHECK(spheres == 4);
    REQUIRE(s.constraints.size() == 4);
    for (const Constraint& c : s.constraints) {
        REQUIRE(std::holds_alternative<DistanceConstraint>(c));
        CHECK(std::get<DistanceConstraint>(c).mode == DistanceMode::MaxDistance);
    }
    REQUIRE(sc.focus.size() == 4);
    const double lowest = s.bodies[sc.focus[1]].position.y;
    CHECK(s.bodies[sc.focus[0]].position.y > lowest);
    for (std::size_t i = 1; i < 4; ++i) CHECK(s.bodies[sc.focus[i]].position.y == lowest);
    CHECK(s.bodies[sc.focus[0]].position.x < s.bodies[sc.focus[1]].position.x);
}

TEST_CASE("capsule chain of one hundred") {
    const Scenario sc = make(ScenarioName::Chain, 100);
    const Scene& s = sc.scene;
    int capsules = 0, spheres = 0;
    for (const RigidBody& b : s.bodies) {
        if (b.is_static() || !b.collider) continue;
        if (std::holds_alternative<Capsule>(*b.collider)) ++capsules;
        if (std::holds_alternative<Sphere>(*b.collider)) ++spheres;
    }
    CHECK(capsules == 100);
    CHECK(spheres == 1);
    CHECK(s.config.num_substeps == 20);
    const RigidBody& heavy = s.bodies[sc.focus.back()];
    CHECK(heavy.mass() > s.bodies[sc.focus.front()].mass());
    for (const Constraint& c : s.constraints) {
        REQUIRE(std::holds_alternative<DistanceConstraint>(c));
        const auto& d = std::get<DistanceConstraint>(c);
        CHECK(d.mode == DistanceMode::Exact);
        CHECK(d.common.compliance == 0.0);
        CHECK(d.rest_distance == 0.0);
    }
    CHECK(s.constraints.size() == 101);
}

TEST_CASE("pyramid of 650 cubes") {
    const Scenario sc = make(ScenarioName::Pyramid, 650);
    const Scene& s = sc.scene;
    REQUIRE(pyramid_layers(650) == 12);
    int cubes = 0, planes = 0;
    for (const RigidBody& b : s.bodies) {
        REQUIRE(b.collider.has_value());
        if (std::holds_alternative<HalfSpace>(*b.collider)) {
            ++planes;
            CHECK(b.is_static());
        } else {
            REQUIRE(std::holds_alternative<Box>(*b.collider));
            const Vec3 h = std::get<Box>(*b.collider).half_extents;
            CHECK(h == Vec3{0.5, 0.5, 0.5});
            ++cubes;
        }
    }
    CHECK(cubes == 650);
    CHECK(planes == 1);
    REQUIRE(sc.tracked.has_value());
    CHECK(s.bodies[*sc.tracked].position.y == doctest::Approx(11.5));
}

TEST_CASE("invalid sizes") {
    CHECK_THROWS_AS(make(ScenarioName::Cradle, 1), InvalidSize);
    CHECK_THROWS_AS(make(ScenarioName::Pyramid, 12), InvalidSize);
    CHECK_THROWS_AS(make(ScenarioName::Chain, -3), InvalidSize);
    CHECK(pyramid_layers(55) == 5);
    CHECK_FALSE(pyramid_layers(56).has_value());
    CHECK_THROWS_AS(parse_scenario("hammock"), UnknownScenario);
}

TEST_CASE("every scenario") {
    for (ScenarioName name : all_scenarios()) {
        CAPTURE(to_string(name));
        CHECK(parse_scenario(to_string(name)) == name);
        const int n = std::min(default_size(name), name == ScenarioName::Pyramid ||
                                                           name == ScenarioName::OverlapPyramid ? 55 : 40);
        const Scenario first = make(name, std::max(n, minimum_size(name)));
        const Scenario second = make(name, std::max(n, minimum_size(name)));
        SUBCASE("rebuild is bit-identical") {
            REQUIRE(first.scene.bodies.size() == second.scene.bodies.size());
            for (std::size_t i = 0; i < first.scene.bodies.size(); ++i)
                CHECK(same_bits(first.scene.bodies[i], second.scene.bodies[i]));
            CHECK(first.scene.constraints.size() == second.scene.constraints.size());
            REQUIRE(first.scene.initial_energy.has_value());
            CHECK(std::memcmp(&*first.scene.initial_energy, &*second.scene.initial_energy, sizeof(double)) == 0);
        }
        SUBCASE("no initial interpenetration") {
            if (name == ScenarioName::OverlapPyramid)
                CHECK(deepest_overlap(first.scene) == doctest::Approx(0.4).epsilon(1e-12));
            else
                CHECK(deepest_overlap(first.scene) <= 1e-12);
        }
    }
}

TEST_CASE("overlap depth follows the spec") {
    ScenarioSpec spec;
    spec.name = ScenarioName::OverlapPyramid;
    spec.n = 14;
    spec.overlap_depth = 0.25;
    CHECK(deepest_overlap(build(spec).scene) == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("overconstrained anchors sit beyond the chain length") {
    const Scenario sc = make(ScenarioName::OverconstrainedChain);
    std::vector<Vec3> anchors;
    for (const RigidBody& b : sc.scene.bodies)
        if (b.is_static()) anchors.push_back(b.position);
    REQUIRE(anchors.size() == 2);
    int links = 0;
    for (const RigidBody& b : sc.scene.bodies)
        if (!b.is_static()) ++links;
    const double chain = links * 2.0 * (dims::capsule_half_length + dims::capsule_radius);
    CHECK(length(anchors[1] - anchors[0]) == doctest::Approx(dims::overconstrained_stretch * chain));
}

TEST_CASE("overrides reach the scene") {
    ScenarioSpec spec;
    spec.name = ScenarioName::Stack;
    spec.n = 3;
    spec.material.static_friction = 0.9;
    spec.config.num_substeps = 7;
    spec.config.solver_mode = SolverMode::Jacobi;
    const Scenario sc = build(spec);
    CHECK(sc.scene.config.num_substeps == 7);
    CHECK(sc.scene.config.solver_mode == SolverMode::Jacobi);
    for (const RigidBody& b : sc.scene.bodies) CHECK(b.material.static_friction == 0.9);
}
