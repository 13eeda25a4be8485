#pragma once

#include <array>
#include <cmath>
#include <stdexcept>

namespace pbrbd {

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    constexpr Vec3() = default;
    constexpr Vec3(double x_, double y_, double z_) : x(x_), y(y_), z(z_) {}

    constexpr double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }
    constexpr double& operator[](int i) { return i == 0 ? x : (i == 1 ? y : z); }

    constexpr Vec3 operator-() const { return {-x, -y, -z}; }
    constexpr Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }
    constexpr Vec3& operator-=(const Vec3& o) { x -= o.x; y -= o.y; z -= o.z; return *this; }
    constexpr Vec3& operator*=(double s) { x *= s; y *= s; z *= s; return *this; }
    constexpr Vec3& operator/=(double s) { x /= s; y /= s; z /= s; return *this; }

    constexpr bool operator==(const Vec3&) const = default;
};

constexpr Vec3 operator+(Vec3 a, const Vec3& b) { return a += b; }
constexpr Vec3 operator-(Vec3 a, const Vec3& b) { return a -= b; }
constexpr Vec3 operator*(Vec3 a, double s) { return a *= s; }
constexpr Vec3 operator*(double s, Vec3 a) { return a *= s; }
constexpr Vec3 operator/(Vec3 a, double s) { return a /= s; }

constexpr double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
constexpr Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
constexpr double length_squared(const Vec3& v) { return dot(v, v); }
inline double length(const Vec3& v) { return std::sqrt(dot(v, v)); }
inline Vec3 normalized(const Vec3& v) {
    const double l = length(v);
    return l > 0.0 ? v / l : Vec3{};
}
constexpr Vec3 cwise_mul(const Vec3& a, const Vec3& b) { return {a.x * b.x, a.y * b.y, a.z * b.z}; }
inline Vec3 cwise_abs(const Vec3& a) { return {std::abs(a.x), std::abs(a.y), std::abs(a.z)}; }
inline bool is_finite(const Vec3& v) {
    return std::isfinite(v.x) && std::isfinite(v.y) && std::isfinite(v.z);
}

/// Any unit vector perpendicular to `v` (v need not be normalized, must be nonzero).
Vec3 any_perpendicular(const Vec3& v);

/// Scalar-first quaternion. Orientation quaternions are kept unit-norm; a
/// pure quaternion (0, v) represents a vector.
struct Quat {
    double s = 1.0;
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    constexpr Quat() = default;
    constexpr Quat(double s_, double x_, double y_, double z_) : s(s_), x(x_), y(y_), z(z_) {}

    static constexpr Quat identity() { return {}; }
    static constexpr Quat pure(const Vec3& v) { return {0.0, v.x, v.y, v.z}; }
    static Quat from_axis_angle(const Vec3& axis, double angle);

    constexpr Vec3 vec() const { return {x, y, z}; }
    constexpr Quat conjugate() const { return {s, -x, -y, -z}; }
    double norm() const { return std::sqrt(s * s + x * x + y * y + z * z); }

    constexpr bool operator==(const Quat&) const = default;
};

constexpr Quat operator*(const Quat& a, const Quat& b) {
    return {a.s * b.s - a.x * b.x - a.y * b.y - a.z * b.z,
            a.s * b.x + a.x * b.s + a.y * b.z - a.z * b.y,
            a.s * b.y - a.x * b.z + a.y * b.s + a.z * b.x,
            a.s * b.z + a.x * b.y - a.y * b.x + a.z * b.s};
}
constexpr Quat operator+(const Quat& a, const Quat& b) { return {a.s + b.s, a.x + b.x, a.y + b.y, a.z + b.z}; }
constexpr Quat operator-(const Quat& a, const Quat& b) { return {a.s - b.s, a.x - b.x, a.y - b.y, a.z - b.z}; }
constexpr Quat operator*(const Quat& q, double k) { return {q.s * k, q.x * k, q.y * k, q.z * k}; }
constexpr Quat operator*(double k, const Quat& q) { return q * k; }

Quat normalized(const Quat& q);
inline bool is_finite(const Quat& q) {
    return std::isfinite(q.s) && std::isfinite(q.x) && std::isfinite(q.y) && std::isfinite(q.z);
}

/// q v q^-1 for unit q.
Vec3 rotate(const Quat& q, const Vec3& v);
/// q^-1 v q for unit q.
Vec3 rotate_inverse(const Quat& q, const Vec3& v);

/// One explicit step of dq/dt = 0.5 (0, w) q followed by renormalization.
/// `w_world` is the angular velocity in world coordinates.
Quat integrate_orientation(const Quat& q, const Vec3& w_world, double h);

struct Mat3 {
    // row-major
    std::array<double, 9> m{};

    static constexpr Mat3 zero() { return {}; }
    static constexpr Mat3 identity() { return diagonal({1.0, 1.0, 1.0}); }
    static constexpr Mat3 diagonal(const Vec3& d) {
        Mat3 r;
        r.m = {d.x, 0, 0, 0, d.y, 0, 0, 0, d.z};
        return r;
    }
    static Mat3 from_rotation(const Quat& q);

    constexpr double operator()(int r, int c) const { return m[static_cast<std::size_t>(3 * r + c)]; }
    constexpr double& operator()(int r, int c) { return m[static_cast<std::size_t>(3 * r + c)]; }

    constexpr Vec3 row(int r) const { return {(*this)(r, 0), (*this)(r, 1), (*this)(r, 2)}; }
    constexpr Vec3 col(int c) const { return {(*this)(0, c), (*this)(1, c), (*this)(2, c)}; }
    constexpr Vec3 diag() const { return {m[0], m[4], m[8]}; }

    constexpr Mat3 transposed() const {
        Mat3 t;
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c) t(c, r) = (*this)(r, c);
        return t;
    }
    double determinant() const;

    constexpr bool operator==(const Mat3&) const = default;
};

constexpr Vec3 operator*(const Mat3& a, const Vec3& v) {
    return {a.m[0] * v.x + a.m[1] * v.y + a.m[2] * v.z,
            a.m[3] * v.x + a.m[4] * v.y + a.m[5] * v.z,
            a.m[6] * v.x + a.m[7] * v.y + a.m[8] * v.z};
}
constexpr Mat3 operator*(const Mat3& a, const Mat3& b) {
    Mat3 r;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            r(i, j) = a(i, 0) * b(0, j) + a(i, 1) * b(1, j) + a(i, 2) * b(2, j);
    return r;
}
constexpr Mat3 operator*(const Mat3& a, double k) {
    Mat3 r = a;
    for (double& e : r.m) e *= k;
    return r;
}
constexpr Mat3 operator+(const Mat3& a, const Mat3& b) {
    Mat3 r = a;
    for (std::size_t i = 0; i < 9; ++i) r.m[i] += b.m[i];
    return r;
}

class DegenerateMatrix : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Inverse of a symmetric positive-definite matrix. Throws DegenerateMatrix
/// when |det| < 1e-300.
Mat3 invert_spd(const Mat3& m);

} // namespace pbrbd
