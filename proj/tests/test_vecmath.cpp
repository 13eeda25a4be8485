#include <doctest.h>

#include <numbers>
#include <random>

#include "pbrbd/vecmath.hpp"
#include "support.hpp"

using namespace pbrbd;
using testsupport::check_close;

namespace {

Mat3 explicit_rotation_matrix(const Quat& q) {
    // textbook form, written out independently of Mat3::from_rotation
    const double s = q.s, x = q.x, y = q.y, z = q.z;
    Mat3 m;
    m.m = {1 - 2 * (y * y + z * z), 2 * (x * y - s * z),     2 * (x * z + s * y),
           2 * (x * y + s * z),     1 - 2 * (x * x + z * z), 2 * (y * z - s * x),
           2 * (x * z - s * y),     2 * (y * z + s * x),     1 - 2 * (x * x + y * y)};
    return m;
}

} // namespace

TEST_CASE("rotate: identity and quarter turn") {
    check_close(rotate(Quat::identity(), {3, 4, 5}), {3, 4, 5}, 0.0);
    const Quat qz = Quat::from_axis_angle({0, 0, 1}, std::numbers::pi / 2);
    check_close(rotate(qz, {1, 0, 0}), {0, 1, 0}, 1e-15);
}

TEST_CASE("rotate: length preserved and agrees with the matrix form") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-5, 5);
    for (int i = 0; i < 200; ++i) {
        const Quat q = testsupport::random_rotation(rng);
        const Vec3 v{u(rng), u(rng), u(rng)};
        const Vec3 r = rotate(q, v);
        CHECK(std::abs(length(r) - length(v)) <= 1e-12);
        check_close(r, explicit_rotation_matrix(q) * v, 1e-12);
        check_close(Mat3::from_rotation(q) * v, r, 1e-12);
    }
}

TEST_CASE("rotate: inverse round trip and composition") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-5, 5);
    for (int i = 0; i < 200; ++i) {
        const Quat q1 = testsupport::random_rotation(rng);
        const Quat q2 = testsupport::random_rotation(rng);
        const Vec3 v{u(rng), u(rng), u(rng)};
        check_close(rotate(q1, rotate_inverse(q1, v)), v, 1e-12);
        check_close(rotate(q1 * q2, v), rotate(q1, rotate(q2, v)), 1e-12);
    }
}

TEST_CASE("integrate_orientation") {
    SUBCASE("zero angular velocity leaves q unchanged") {
        const Quat q = normalized(Quat{0.3, -0.2, 0.5, 0.7});
        const Quat r = integrate_orientation(q, {0, 0, 0}, 0.37);
        CHECK(r.s == doctest::Approx(q.s).epsilon(1e-15));
        CHECK(r.x == doctest::Approx(q.x).epsilon(1e-15));
        CHECK(r.y == doctest::Approx(q.y).epsilon(1e-15));
        CHECK(r.z == doctest::Approx(q.z).epsilon(1e-15));
    }
    SUBCASE("100 small steps approach the exact quarter turn") {
        Quat q = Quat::identity();
        for (int i = 0; i < 100; ++i) q = integrate_orientation(q, {0, 0, std::numbers::pi / 2}, 0.01);
        const Quat exact = Quat::from_axis_angle({0, 0, 1}, std::numbers::pi / 2);
        const double d = std::min((q - exact).norm(), (q + exact).norm());
        CHECK(d < 0.05);
    }
    SUBCASE("result is unit length") {
        std::mt19937_64 rng(3);
        for (int i = 0; i < 100; ++i) {
            const Quat q = integrate_orientation(testsupport::random_rotation(rng),
                                                 testsupport::random_unit(rng) * 40.0, 0.05);
            CHECK(std::abs(q.norm() - 1.0) <= 1e-12);
        }
    }
}

TEST_CASE("invert_spd") {
    const Mat3 i = invert_spd(Mat3::identity());
    CHECK(i == Mat3::identity());
    const Mat3 d = invert_spd(Mat3::diagonal({2, 4, 8}));
    CHECK(d(0, 0) == doctest::Approx(0.5));
    CHECK(d(1, 1) == doctest::Approx(0.25));
    CHECK(d(2, 2) == doctest::Approx(0.125));
    CHECK(d(0, 1) == 0.0);

    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-1, 1);
    for (int t = 0; t < 100; ++t) {
        Mat3 a;
        for (double& e : a.m) e = u(rng);
        const Mat3 spd = a * a.transposed() + Mat3::identity() * 0.1;
        const Mat3 prod = spd * invert_spd(spd);
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c) CHECK(std::abs(prod(r, c) - (r == c ? 1.0 : 0.0)) <= 1e-9);
    }
    CHECK_THROWS_AS(invert_spd(Mat3::zero()), DegenerateMatrix);
}
