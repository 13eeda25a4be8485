#pragma once

#include <stdexcept>
#include <variant>

#include "pbrbd/vecmath.hpp"

namespace pbrbd {

struct Sphere {
    double radius = 0.5;
};

struct Box {
    Vec3 half_extents{0.5, 0.5, 0.5};
};

/// Segment along local y from -half_length to +half_length, swept by `radius`.
struct Capsule {
    double half_length = 0.5;
    double radius = 0.1;
};

/// Points p with dot(normal, p) <= offset, in the owning body's frame.
/// Only meaningful on static bodies.
struct HalfSpace {
    Vec3 normal{0.0, 1.0, 0.0};
    double offset = 0.0;
};

using ColliderShape = std::variant<Sphere, Box, Capsule, HalfSpace>;

enum class ShapeKind { Sphere = 0, Box = 1, Capsule = 2, HalfSpace = 3 };

inline ShapeKind kind_of(const ColliderShape& s) { return static_cast<ShapeKind>(s.index()); }
const char* to_string(ShapeKind k);

class InvalidShape : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Throws InvalidShape for non-positive dimensions or a non-unit half-space normal.
void validate(const ColliderShape& shape);

/// Radius of a sphere about the body origin enclosing the shape. Infinite for half-spaces.
double bounding_radius(const ColliderShape& shape);

} // namespace pbrbd
