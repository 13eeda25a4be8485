#pragma once

#include <cmath>
#include <random>

#include <doctest.h>

#include "pbrbd/vecmath.hpp"

namespace testsupport {

inline pbrbd::Vec3 random_unit(std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    for (;;) {
        const pbrbd::Vec3 v{g(rng), g(rng), g(rng)};
        if (pbrbd::length(v) > 1e-3) return pbrbd::normalized(v);
    }
}

inline pbrbd::Quat random_rotation(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> angle(-3.0, 3.0);
    return pbrbd::Quat::from_axis_angle(random_unit(rng), angle(rng));
}

inline void check_close(const pbrbd::Vec3& a, const pbrbd::Vec3& b, double tol) {
    CHECK(std::abs(a.x - b.x) <= tol);
    CHECK(std::abs(a.y - b.y) <= tol);
    CHECK(std::abs(a.z - b.z) <= tol);
}

} // namespace testsupport
