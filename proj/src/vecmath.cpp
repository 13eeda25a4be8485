#include "pbrbd/vecmath.hpp"

namespace pbrbd {

Vec3 any_perpendicular(const Vec3& v) {
    // cross with the axis least aligned with v
    const Vec3 a = cwise_abs(v);
    Vec3 other{1.0, 0.0, 0.0};
    if (a.y <= a.x && a.y <= a.z)
        other = {0.0, 1.0, 0.0};
    else if (a.z <= a.x && a.z <= a.y)
        other = {0.0, 0.0, 1.0};
    return normalized(cross(v, other));
}

Quat Quat::from_axis_angle(const Vec3& axis, double angle) {
    const Vec3 n = normalized(axis);
    const double half = 0.5 * angle;
    const double sh = std::sin(half);
    return {std::cos(half), n.x * sh, n.y * sh, n.z * sh};
}

Quat normalized(const Quat& q) {
    const double n = q.norm();
    if (n <= 0.0) return Quat::identity();
    return q * (1.0 / n);
}

Vec3 rotate(const Quat& q, const Vec3& v) {
    // v + 2 s (u x v) + 2 u x (u x v), u = vector part
    const Vec3 u = q.vec();
    const Vec3 t = 2.0 * cross(u, v);
    return v + q.s * t + cross(u, t);
}

Vec3 rotate_inverse(const Quat& q, const Vec3& v) { return rotate(q.conjugate(), v); }

Quat integrate_orientation(const Quat& q, const Vec3& w_world, double h) {
    const Quat dq = Quat::pure(w_world) * q;
    return normalized(q + dq * (0.5 * h));
}

Mat3 Mat3::from_rotation(const Quat& q) {
    const double s = q.s, x = q.x, y = q.y, z = q.z;
    Mat3 r;
    r.m = {1 - 2 * (y * y + z * z), 2 * (x * y - s * z),     2 * (x * z + s * y),
           2 * (x * y + s * z),     1 - 2 * (x * x + z * z), 2 * (y * z - s * x),
           2 * (x * z - s * y),     2 * (y * z + s * x),     1 - 2 * (x * x + y * y)};
    return r;
}

double Mat3::determinant() const {
    return m[0] * (m[4] * m[8] - m[5] * m[7]) - m[1] * (m[3] * m[8] - m[5] * m[6]) +
           m[2] * (m[3] * m[7] - m[4] * m[6]);
}

Mat3 invert_spd(const Mat3& a) {
    const double det = a.determinant();
    if (!(std::abs(det) >= 1e-300)) throw DegenerateMatrix("invert_spd: determinant magnitude below 1e-300");
    // adjugate / det; symmetric input gives a symmetric result
    Mat3 r;
    const auto& m = a.m;
    const double inv = 1.0 / det;
    r.m = {(m[4] * m[8] - m[5] * m[7]) * inv, (m[2] * m[7] - m[1] * m[8]) * inv, (m[1] * m[5] - m[2] * m[4]) * inv,
           (m[5] * m[6] - m[3] * m[8]) * inv, (m[0] * m[8] - m[2] * m[6]) * inv, (m[2] * m[3] - m[0] * m[5]) * inv,
           (m[3] * m[7] - m[4] * m[6]) * inv, (m[1] * m[6] - m[0] * m[7]) * inv, (m[0] * m[4] - m[1] * m[3]) * inv};
    return r;
}

} // namespace pbrbd
