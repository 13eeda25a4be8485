#include <doctest.h>

#include <algorithm>
#include <numbers>
#include <random>

#include "pbrbd/bodies.hpp"
#include "pbrbd/engine.hpp"
#include "support.hpp"

using namespace pbrbd;
using testsupport::check_close;

TEST_CASE("inertia tensors of solid primitives") {
    const Mat3 cube = inertia_tensor(Box{{0.5, 0.5, 0.5}}, 1.0);
    for (int i = 0; i < 3; ++i) CHECK(cube(i, i) == doctest::Approx(1.0 / 6.0).epsilon(1e-14));
    const Mat3 sphere = inertia_tensor(Sphere{1.0}, 1.0);
    for (int i = 0; i < 3; ++i) CHECK(sphere(i, i) == doctest::Approx(0.4).epsilon(1e-14));
    const Mat3 brick = inertia_tensor(Box{{0.5, 1.0, 1.5}}, 12.0);
    CHECK(brick(0, 0) == doctest::Approx(13.0).epsilon(1e-14));
    CHECK(brick(1, 1) == doctest::Approx(10.0).epsilon(1e-14));
    CHECK(brick(2, 2) == doctest::Approx(5.0).epsilon(1e-14));
    CHECK(brick(0, 1) == 0.0);
}

TEST_CASE("inertia scales with mass and size") {
    const Mat3 a = inertia_tensor(Capsule{0.7, 0.2}, 2.0);
    const Mat3 b = inertia_tensor(Capsule{0.7, 0.2}, 6.0);
    const Mat3 c = inertia_tensor(Capsule{1.4, 0.4}, 2.0);
    for (int i = 0; i < 3; ++i) {
        CHECK(b(i, i) == doctest::Approx(3.0 * a(i, i)).epsilon(1e-13));
        CHECK(c(i, i) == doctest::Approx(4.0 * a(i, i)).epsilon(1e-13));
    }
}

TEST_CASE("capsule inertia matches a Monte-Carlo mass integral") {
    const double hl = 0.5, r = 0.3, mass = 2.0;
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> ux(-r, r), uy(-hl - r, hl + r);
    double sxx = 0, syy = 0, szz = 0;
    long inside = 0;
    for (long i = 0; i < 4'000'000; ++i) {
        const double x = ux(rng), y = uy(rng), z = ux(rng);
        const double cy = std::clamp(y, -hl, hl);
        if (x * x + (y - cy) * (y - cy) + z * z > r * r) continue;
        ++inside;
        sxx += y * y + z * z;
        syy += x * x + z * z;
        szz += x * x + y * y;
    }
    const Mat3 I = inertia_tensor(Capsule{hl, r}, mass);
    CHECK(I(0, 0) == doctest::Approx(mass * sxx / inside).epsilon(5e-3));
    CHECK(I(1, 1) == doctest::Approx(mass * syy / inside).epsilon(5e-3));
    CHECK(I(2, 2) == doctest::Approx(mass * szz / inside).epsilon(5e-3));
}

TEST_CASE("inertia rejects bad input") {
    CHECK_THROWS_AS(inertia_tensor(Box{{0.5, -1.0, 0.5}}, 1.0), InvalidShape);
    CHECK_THROWS_AS(inertia_tensor(Sphere{0.0}, 1.0), InvalidShape);
    CHECK_THROWS_AS(inertia_tensor(Sphere{1.0}, 0.0), InvalidShape);
    CHECK_THROWS_AS(inertia_tensor(HalfSpace{}, 1.0), InvalidShape);
}

TEST_CASE("generalized inverse mass, positional") {
    const RigidBody ground = make_static_body(HalfSpace{}, {});
    CHECK(generalized_inverse_mass_positional(ground, {1, 2, 3}, {0, 1, 0}) == 0.0);
    const RigidBody cube = make_dynamic_body(Box{{0.5, 0.5, 0.5}}, 1.0, {});
    CHECK(generalized_inverse_mass_positional(cube, {0, 0, 0}, {0, 1, 0}) == 1.0);
    CHECK(generalized_inverse_mass_positional(cube, {0.5, 0, 0}, {0, 1, 0}) == doctest::Approx(2.5).epsilon(1e-14));
}

TEST_CASE("generalized inverse mass, angular") {
    const RigidBody ground = make_static_body(HalfSpace{}, {});
    CHECK(generalized_inverse_mass_angular(ground, {0, 0, 1}) == 0.0);
    RigidBody b = make_dynamic_body(Box{{0.5, 0.5, 0.5}}, 1.0, {});
    b.inertia_body = Mat3::diagonal({1, 2, 4});
    b.inverse_inertia_body = invert_spd(b.inertia_body);
    CHECK(generalized_inverse_mass_angular(b, {0, 0, 1}) == doctest::Approx(0.25).epsilon(1e-15));

    std::mt19937_64 rng(1);
    b.inertia_body = Mat3::diagonal({1.3, 0.4, 2.2});
    b.inverse_inertia_body = invert_spd(b.inertia_body);
    for (int i = 0; i < 100; ++i) {
        const Vec3 axis = testsupport::random_unit(rng);
        const Quat q = testsupport::random_rotation(rng);
        RigidBody rotated = b;
        rotated.orientation = q * b.orientation;
        const double before = generalized_inverse_mass_angular(b, axis);
        CHECK(std::abs(generalized_inverse_mass_angular(rotated, rotate(q, axis)) - before) <= 1e-12);
    }
}

TEST_CASE("positional correction kernel") {
    SUBCASE("static body is bit-identical afterwards") {
        RigidBody g = make_static_body(Box{}, {1, 2, 3}, Quat::from_axis_angle({1, 0, 0}, 0.3));
        const RigidBody before = g;
        apply_positional_correction(g, {0.5, 0, 0}, {0, 1, 0});
        apply_angular_correction(g, {0, 0, 1}, 0.7, 1.0);
        CHECK(g.position == before.position);
        CHECK(g.orientation == before.orientation);
    }
    SUBCASE("zero lever is a pure translation") {
        RigidBody b = make_dynamic_body(Box{}, 2.0, {});
        apply_positional_correction(b, {0, 0, 0}, {0.2, 0, 0});
        check_close(b.position, {0.1, 0, 0}, 1e-15);
        CHECK(b.orientation == Quat::identity());
    }
    SUBCASE("offset push turns about +z and lifts the centre") {
        RigidBody b = make_dynamic_body(Box{{0.5, 0.5, 0.5}}, 1.0, {});
        apply_positional_correction(b, {0.5, 0, 0}, {0, 0.1, 0});
        CHECK(b.position.y > 0.0);
        CHECK(b.orientation.z > 0.0);
        CHECK(std::abs(b.orientation.x) < 1e-15);
        CHECK(std::abs(b.orientation.y) < 1e-15);
        CHECK(std::abs(b.orientation.norm() - 1.0) < 1e-12);
    }
}

TEST_CASE("angular correction kernel") {
    RigidBody b = make_dynamic_body(Sphere{0.5}, 1.0, {}, Quat::from_axis_angle({0, 1, 0}, 0.4));
    const Quat before = b.orientation;
    apply_angular_correction(b, {0, 0, 1}, 0.0, 1.0);
    CHECK(b.orientation == before);

    std::mt19937_64 rng(4);
    for (int i = 0; i < 50; ++i) {
        RigidBody s = make_dynamic_body(Sphere{0.5}, 1.0, {}, testsupport::random_rotation(rng));
        const Quat q0 = s.orientation;
        const Vec3 axis = testsupport::random_unit(rng);
        apply_angular_correction(s, axis, 0.01, 1.0);
        CHECK(std::abs(s.orientation.norm() - 1.0) <= 1e-12);
        const Quat dq = s.orientation * q0.conjugate();
        const Vec3 turn = normalized(dq.vec());
        CHECK(length(cross(turn, axis)) <= 1e-9);
        CHECK(dot(turn, axis) * dq.s > 0.0);
    }
}

TEST_CASE("a positional correction acts like an impulse at the contact point") {
    const double h = 0.01;
    const Vec3 r{0.5, -0.5, 0.3};
    const Vec3 J{1e-3, 2e-3, -5e-4};
    Scene scene;
    scene.add_body(make_dynamic_body(Box{{0.5, 0.5, 0.5}}, 1.0, {}, Quat::from_axis_angle({0, 1, 0}, 0.2)));
    RigidBody& b = scene.bodies[0];
    b.prev_position = b.position;
    b.prev_orientation = b.orientation;
    apply_positional_correction(b, r, J * h);
    velocity_update(scene, h);

    const Vec3 r_world = rotate(b.prev_orientation, r);
    const Vec3 dv = J * b.inverse_mass;
    const Vec3 dw = b.apply_inverse_inertia_world(cross(r_world, J));
    check_close(b.velocity, dv, 1e-9);
    check_close(b.angular_velocity_world(), dw, 1e-9);
}
