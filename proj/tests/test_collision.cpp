#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>
#include <vector>

#include "pbrbd/collision.hpp"
#include "support.hpp"

using namespace pbrbd;
using testsupport::check_close;

namespace {

// containment written out per shape, independent of the library
bool inside(const RigidBody& body, const Vec3& p_world) {
    const Vec3 p = body.to_local(p_world);
    return std::visit(
        [&](const auto& s) -> bool {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, Sphere>) return length(p) < s.radius;
            else if constexpr (std::is_same_v<T, Box>)
                return std::abs(p.x) < s.half_extents.x && std::abs(p.y) < s.half_extents.y &&
                       std::abs(p.z) < s.half_extents.z;
            else if constexpr (std::is_same_v<T, Capsule>) {
                const Vec3 c{0, std::clamp(p.y, -s.half_length, s.half_length), 0};
                return length(p - c) < s.radius;
            } else
                return dot(s.normal, p) < s.offset;
        },
        *body.collider);
}

ColliderShape random_shape(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> size(0.2, 0.8);
    switch (std::uniform_int_distribution<int>(0, 2)(rng)) {
    case 0: return Sphere{size(rng)};
    case 1: return Box{{size(rng), size(rng), size(rng)}};
    default: return Capsule{size(rng), 0.5 * size(rng)};
    }
}

RigidBody random_body(std::mt19937_64& rng, double spread) {
    std::uniform_real_distribution<double> u(-spread, spread);
    return make_dynamic_body(random_shape(rng), 1.0, {u(rng), u(rng), u(rng)}, testsupport::random_rotation(rng));
}

std::vector<Vec3> samples_inside(const RigidBody& body, std::mt19937_64& rng, int count) {
    const double r = bounding_radius(*body.collider);
    std::uniform_real_distribution<double> u(-r, r);
    std::vector<Vec3> out;
    while (static_cast<int>(out.size()) < count) {
        const Vec3 p = body.position + Vec3{u(rng), u(rng), u(rng)};
        if (inside(body, p)) out.push_back(p);
    }
    return out;
}

bool overlapping(const RigidBody& a, const RigidBody& b, std::mt19937_64& rng) {
    for (const Vec3& p : samples_inside(a, rng, 400))
        if (inside(b, p)) return true;
    return false;
}

} // namespace

TEST_CASE("broad phase small cases") {
    std::vector<RigidBody> far{make_dynamic_body(Sphere{1.0}, 1.0, {0, 0, 0}),
                               make_dynamic_body(Sphere{1.0}, 1.0, {10, 0, 0})};
    CHECK(broad_phase(far, {}).empty());
    std::vector<RigidBody> boxes{make_dynamic_body(Box{}, 1.0, {0, 0, 0}), make_dynamic_body(Box{}, 1.0, {0.5, 0, 0})};
    const auto pairs = broad_phase(boxes, {});
    REQUIRE(pairs.size() == 1);
    CHECK(pairs[0] == CandidatePair{0, 1});
    CollisionFilter filter;
    filter.ignore(1, 0);
    CHECK(broad_phase(boxes, {}, filter).empty());
}

TEST_CASE("broad phase equals the brute-force box check") {
    std::mt19937_64 rng(123);
    std::uniform_real_distribution<double> u(-6, 6), v(-2, 2);
    for (int scene = 0; scene < 5; ++scene) {
        std::vector<RigidBody> bodies;
        bodies.push_back(make_static_body(HalfSpace{}, {0, -5, 0}));
        for (int i = 0; i < 100; ++i) {
            RigidBody b = make_dynamic_body(Sphere{0.3 + 0.2 * (i % 3)}, 1.0, {u(rng), u(rng), u(rng)});
            b.velocity = {v(rng), v(rng), v(rng)};
            bodies.push_back(b);
        }
        const BroadPhaseParams params;
        std::set<CandidatePair> expected;
        for (BodyId i = 0; i < bodies.size(); ++i)
            for (BodyId j = i + 1; j < bodies.size(); ++j) {
                if (!may_collide(bodies[i], bodies[j], i, j, {})) continue;
                const bool hit = bodies[i].collider && kind_of(*bodies[i].collider) == ShapeKind::HalfSpace
                                     ? aabb_reaches_half_space(swept_aabb(bodies[j], params), bodies[i])
                                     : swept_aabb(bodies[i], params).overlaps(swept_aabb(bodies[j], params));
                if (hit) expected.insert({i, j});
            }
        const auto got = broad_phase(bodies, params);
        CHECK(std::is_sorted(got.begin(), got.end()));
        CHECK(std::set<CandidatePair>(got.begin(), got.end()) == expected);
    }
}

TEST_CASE("broad phase is a superset of narrow-phase contacts") {
    std::mt19937_64 rng(77);
    std::vector<RigidBody> bodies;
    for (int i = 0; i < 80; ++i) bodies.push_back(random_body(rng, 3.0));
    const auto pairs = broad_phase(bodies, {});
    const std::set<CandidatePair> set(pairs.begin(), pairs.end());
    for (BodyId i = 0; i < bodies.size(); ++i)
        for (BodyId j = i + 1; j < bodies.size(); ++j)
            if (!narrow_phase(bodies[i], i, bodies[j], j, 1e-4).empty()) CHECK(set.contains({i, j}));
}

TEST_CASE("sphere pair closed form") {
    const RigidBody a = make_dynamic_body(Sphere{1.0}, 1.0, {0, 0, 0});
    const RigidBody b = make_dynamic_body(Sphere{1.0}, 1.0, {1.5, 0, 0});
    const auto cs = narrow_phase(a, 0, b, 1, 1e-4);
    REQUIRE(cs.size() == 1);
    CHECK(cs[0].depth == doctest::Approx(0.5).epsilon(1e-14));
    check_close(cs[0].normal, {-1, 0, 0}, 1e-15);
    check_close(cs[0].point, {0.75, 0, 0}, 1e-15);
}

TEST_CASE("box resting on the ground gives a four-point manifold") {
    const RigidBody cube = make_dynamic_body(Box{{0.5, 0.5, 0.5}}, 1.0, {0, 0.5, 0});
    const RigidBody ground = make_static_body(HalfSpace{}, {});
    const auto cs = narrow_phase(cube, 1, ground, 0, 1e-4);
    REQUIRE(cs.size() == 4);
    for (const Contact& c : cs) {
        CHECK(std::abs(c.depth) < 1e-12);
        check_close(c.normal, {0, 1, 0}, 1e-15);
    }
}

TEST_CASE("overlapping cubes use the face axis") {
    const RigidBody a = make_dynamic_body(Box{{0.5, 0.5, 0.5}}, 1.0, {0, 0, 0});
    const RigidBody b = make_dynamic_body(Box{{0.5, 0.5, 0.5}}, 1.0, {0, 0.9, 0});
    const auto cs = narrow_phase(a, 0, b, 1, 1e-4);
    REQUIRE(!cs.empty());
    CHECK(cs.size() <= 4);
    for (const Contact& c : cs) {
        CHECK(std::abs(c.normal.y) == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(c.depth == doctest::Approx(0.1).epsilon(1e-12));
    }
}

TEST_CASE("unsupported pairs are rejected") {
    const RigidBody p = make_static_body(HalfSpace{}, {});
    RigidBody q = make_static_body(HalfSpace{}, {0, 1, 0});
    q.inverse_mass = 1.0;
    CHECK_THROWS_AS(narrow_phase(q, 0, p, 1, 1e-4), UnsupportedPair);
}

TEST_CASE("separating by the reported depth removes the overlap") {
    std::mt19937_64 rng(2024);
    int tested = 0;
    while (tested < 1000) {
        RigidBody a = random_body(rng, 0.4);
        const RigidBody b = random_body(rng, 0.4);
        const auto cs = narrow_phase(a, 0, b, 1, 1e-4);
        if (cs.empty() || !overlapping(a, b, rng)) continue;
        ++tested;
        const auto deepest = std::max_element(cs.begin(), cs.end(),
                                               [](const Contact& x, const Contact& y) { return x.depth < y.depth; });
        a.position += deepest->normal * (deepest->depth + 1e-6);
        CHECK_FALSE(overlapping(a, b, rng));
    }
}

TEST_CASE("narrow phase is symmetric in its arguments") {
    std::mt19937_64 rng(55);
    int tested = 0;
    while (tested < 500) {
        const RigidBody a = random_body(rng, 0.5);
        const RigidBody b = random_body(rng, 0.5);
        const auto ab = narrow_phase(a, 0, b, 1, 1e-4);
        const auto ba = narrow_phase(b, 1, a, 0, 1e-4);
        REQUIRE(ab.size() == ba.size());
        if (ab.empty()) continue;
        ++tested;
        for (const Contact& c : ab) {
            const bool matched = std::any_of(ba.begin(), ba.end(), [&](const Contact& d) {
                const bool flipped = c.body_a == d.body_b && c.body_b == d.body_a;
                const bool same = c.body_a == d.body_a && c.body_b == d.body_b;
                const Vec3 n = flipped ? -d.normal : d.normal;
                return (flipped || same) && length(n - c.normal) < 1e-12 && std::abs(c.depth - d.depth) < 1e-12 &&
                       length(c.point - d.point) < 1e-12;
            });
            CHECK(matched);
        }
    }
}

TEST_CASE("current depth follows the bodies") {
    RigidBody a = make_dynamic_body(Sphere{1.0}, 1.0, {0, 0, 0});
    const RigidBody b = make_dynamic_body(Sphere{1.0}, 1.0, {1.5, 0, 0});
    const auto cs = narrow_phase(a, 0, b, 1, 1e-4);
    REQUIRE(cs.size() == 1);
    CHECK(current_depth(cs[0], a, b) == doctest::Approx(0.5));
    a.position.x -= 0.2;
    CHECK(current_depth(cs[0], a, b) == doctest::Approx(0.3));
    a.orientation = Quat::from_axis_angle({0, 0, 1}, 1.0);
    CHECK(current_depth(cs[0], a, b) == doctest::Approx(0.3));
}
