#include "pbrbd/collision.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace pbrbd {

namespace {

constexpr double kEps = 1e-12;

struct Pose {
    Vec3 x;
    Quat q;
    std::array<Vec3, 3> axes;

    explicit Pose(const RigidBody& b) : x(b.position), q(b.orientation) {
        const Mat3 r = Mat3::from_rotation(b.orientation);
        axes = {r.col(0), r.col(1), r.col(2)};
    }
    Vec3 to_local(const Vec3& p) const {
        const Vec3 d = p - x;
        return {dot(d, axes[0]), dot(d, axes[1]), dot(d, axes[2])};
    }
    Vec3 to_world(const Vec3& l) const { return x + axes[0] * l.x + axes[1] * l.y + axes[2] * l.z; }
};

// Contact in world space: normal points from b to a, point_a is a's deepest
// point and point_b = point_a + depth * normal lies on b's surface.
// radius_a / radius_b are the rounding radii of curved shapes (0 otherwise):
// point_a + radius_a * normal is a point on a's core (center or segment).
struct Raw {
    Vec3 point_a;
    Vec3 normal;
    double depth;
    double radius_a;
    double radius_b;
};

using RawList = std::vector<Raw>;

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

struct SegmentClosest {
    double s;
    double t;
    Vec3 c1;
    Vec3 c2;
};

// Closest points between segments p1q1 and p2q2. Parallel overlapping
// segments report the middle of the overlap.
SegmentClosest closest_segment_segment(const Vec3& p1, const Vec3& q1, const Vec3& p2, const Vec3& q2) {
    const Vec3 d1 = q1 - p1;
    const Vec3 d2 = q2 - p2;
    const Vec3 r = p1 - p2;
    const double a = dot(d1, d1);
    const double e = dot(d2, d2);
    const double f = dot(d2, r);
    double s = 0.0;
    double t = 0.0;
    if (a <= kEps && e <= kEps) {
        s = t = 0.0;
    } else if (a <= kEps) {
        t = clamp01(f / e);
    } else {
        const double c = dot(d1, r);
        if (e <= kEps) {
            s = clamp01(-c / a);
        } else {
            const double b = dot(d1, d2);
            const double denom = a * e - b * b;
            if (denom > 1e-10 * a * e) {
                s = clamp01((b * f - c * e) / denom);
            } else {
                // parallel: middle of the projected overlap on segment 1
                const double s0 = dot(p2 - p1, d1) / a;
                const double s1 = dot(q2 - p1, d1) / a;
                const double lo = std::max(0.0, std::min(s0, s1));
                const double hi = std::min(1.0, std::max(s0, s1));
                s = lo <= hi ? 0.5 * (lo + hi) : (s1 < 0.0 && s0 < 0.0 ? 0.0 : 1.0);
            }
            t = (b * s + f) / e;
            if (t < 0.0) {
                t = 0.0;
                s = clamp01(-c / a);
            } else if (t > 1.0) {
                t = 1.0;
                s = clamp01((b - c) / a);
            }
        }
    }
    return {s, t, p1 + d1 * s, p2 + d2 * t};
}

Vec3 closest_on_segment(const Vec3& p, const Vec3& a, const Vec3& b) {
    const Vec3 d = b - a;
    const double dd = dot(d, d);
    if (dd <= kEps) return a;
    return a + d * clamp01(dot(p - a, d) / dd);
}

void capsule_segment(const RigidBody& body, const Capsule& c, Vec3& p0, Vec3& p1) {
    const Vec3 half = rotate(body.orientation, Vec3{0.0, c.half_length, 0.0});
    p0 = body.position - half;
    p1 = body.position + half;
}

void half_space_world(const RigidBody& body, const HalfSpace& h, Vec3& n, double& offset) {
    n = rotate(body.orientation, h.normal);
    offset = h.offset + dot(n, body.position);
}

// ---------------------------------------------------------------------------
// pair routines, first argument is body a

void push_sphere_pair(RawList& out, const Vec3& ca, double ra, const Vec3& cb, double rb, const Vec3& fallback,
                      double slop) {
    const Vec3 d = ca - cb;
    const double dist = length(d);
    const Vec3 n = dist > kEps ? d / dist : fallback;
    const double depth = ra + rb - dist;
    if (depth > -slop) out.push_back({ca - n * ra, n, depth, ra, rb});
}

RawList sphere_sphere(const RigidBody& a, const Sphere& sa, const RigidBody& b, const Sphere& sb, double slop) {
    RawList out;
    push_sphere_pair(out, a.position, sa.radius, b.position, sb.radius, {0.0, 1.0, 0.0}, slop);
    return out;
}

RawList sphere_half_space(const RigidBody& a, const Sphere& s, const RigidBody& b, const HalfSpace& h, double slop) {
    Vec3 n;
    double o = 0.0;
    half_space_world(b, h, n, o);
    const double depth = s.radius - (dot(n, a.position) - o);
    if (depth <= -slop) return {};
    return {{a.position - n * s.radius, n, depth, s.radius, 0.0}};
}

// Sphere (or segment point) against a box: exact closest-feature contact.
bool point_box_contact(const Vec3& c, double r, const Pose& box, const Vec3& e, Raw& out) {
    const Vec3 l = box.to_local(c);
    const bool inside = std::abs(l.x) <= e.x && std::abs(l.y) <= e.y && std::abs(l.z) <= e.z;
    if (!inside) {
        const Vec3 q{std::clamp(l.x, -e.x, e.x), std::clamp(l.y, -e.y, e.y), std::clamp(l.z, -e.z, e.z)};
        const Vec3 d_local = l - q;
        const double dist = length(d_local);
        const Vec3 n_local = d_local / dist;
        const Vec3 n = box.axes[0] * n_local.x + box.axes[1] * n_local.y + box.axes[2] * n_local.z;
        out = {c - n * r, n, r - dist, r, 0.0};
        return true;
    }
    int axis = 0;
    double face = e.x - std::abs(l.x);
    for (int i = 1; i < 3; ++i) {
        const double f = e[i] - std::abs(l[i]);
        if (f < face) {
            face = f;
            axis = i;
        }
    }
    const Vec3 n = box.axes[static_cast<std::size_t>(axis)] * (l[axis] >= 0.0 ? 1.0 : -1.0);
    out = {c - n * r, n, r + face, r, 0.0};
    return true;
}

RawList sphere_box(const RigidBody& a, const Sphere& s, const RigidBody& b, const Box& bx, double slop) {
    Raw r{};
    point_box_contact(a.position, s.radius, Pose(b), bx.half_extents, r);
    if (r.depth <= -slop) return {};
    return {r};
}

RawList sphere_capsule(const RigidBody& a, const Sphere& s, const RigidBody& b, const Capsule& c, double slop) {
    Vec3 p0, p1;
    capsule_segment(b, c, p0, p1);
    const Vec3 q = closest_on_segment(a.position, p0, p1);
    RawList out;
    push_sphere_pair(out, a.position, s.radius, q, c.radius, any_perpendicular(p1 - p0), slop);
    return out;
}

RawList capsule_half_space(const RigidBody& a, const Capsule& c, const RigidBody& b, const HalfSpace& h,
                           double slop) {
    Vec3 p0, p1, n;
    double o = 0.0;
    capsule_segment(a, c, p0, p1);
    half_space_world(b, h, n, o);
    RawList out;
    for (const Vec3& p : {p0, p1}) {
        const double depth = c.radius - (dot(n, p) - o);
        if (depth > -slop) out.push_back({p - n * c.radius, n, depth, c.radius, 0.0});
    }
    return out;
}

RawList capsule_capsule(const RigidBody& a, const Capsule& ca, const RigidBody& b, const Capsule& cb, double slop) {
    Vec3 a0, a1, b0, b1;
    capsule_segment(a, ca, a0, a1);
    capsule_segment(b, cb, b0, b1);
    const SegmentClosest cl = closest_segment_segment(a0, a1, b0, b1);
    Vec3 fallback = cross(a1 - a0, b1 - b0);
    if (length(fallback) < 1e-9) fallback = any_perpendicular(a1 - a0);
    fallback = normalized(fallback);
    if (dot(fallback, a.position - b.position) < 0.0) fallback = -fallback;
    RawList out;
    push_sphere_pair(out, cl.c1, ca.radius, cl.c2, cb.radius, fallback, slop);
    return out;
}

std::array<Vec3, 8> box_vertices(const Pose& p, const Vec3& e) {
    std::array<Vec3, 8> v;
    for (int i = 0; i < 8; ++i) {
        const Vec3 l{(i & 1) ? e.x : -e.x, (i & 2) ? e.y : -e.y, (i & 4) ? e.z : -e.z};
        v[static_cast<std::size_t>(i)] = p.to_world(l);
    }
    return v;
}

RawList box_half_space(const RigidBody& a, const Box& bx, const RigidBody& b, const HalfSpace& h, double slop) {
    Vec3 n;
    double o = 0.0;
    half_space_world(b, h, n, o);
    RawList out;
    for (const Vec3& v : box_vertices(Pose(a), bx.half_extents)) {
        const double depth = o - dot(n, v);
        if (depth > -slop) out.push_back({v, n, depth, 0.0, 0.0});
    }
    std::stable_sort(out.begin(), out.end(), [](const Raw& l, const Raw& r) { return l.depth > r.depth; });
    if (out.size() > 4) out.resize(4);
    return out;
}

// Keeps four points spanning the largest area, starting from the deepest.
void reduce_manifold(RawList& pts) {
    if (pts.size() <= 4) return;
    const Vec3 n = pts.front().normal;
    std::size_t i0 = 0;
    for (std::size_t i = 1; i < pts.size(); ++i)
        if (pts[i].depth > pts[i0].depth) i0 = i;
    std::size_t i1 = i0;
    double best = -1.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const double d = length_squared(pts[i].point_a - pts[i0].point_a);
        if (d > best) {
            best = d;
            i1 = i;
        }
    }
    auto area = [&](std::size_t i) {
        return dot(cross(pts[i1].point_a - pts[i0].point_a, pts[i].point_a - pts[i0].point_a), n);
    };
    std::size_t i2 = i0, i3 = i0;
    double amax = -std::numeric_limits<double>::infinity();
    double amin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (i == i0 || i == i1) continue;
        const double ar = area(i);
        if (ar > amax) {
            amax = ar;
            i2 = i;
        }
        if (ar < amin) {
            amin = ar;
            i3 = i;
        }
    }
    if (i3 == i2) {
        // every point on one side: take the next largest magnitude
        double second = -1.0;
        for (std::size_t i = 0; i < pts.size(); ++i) {
            if (i == i0 || i == i1 || i == i2) continue;
            if (std::abs(area(i)) > second) {
                second = std::abs(area(i));
                i3 = i;
            }
        }
    }
    RawList kept;
    for (std::size_t i : {i0, i1, i2, i3}) kept.push_back(pts[i]);
    pts = std::move(kept);
}

using Polygon = std::vector<Vec3>;

// Sutherland-Hodgman against dot(axis, v - origin) <= limit.
Polygon clip(const Polygon& poly, const Vec3& origin, const Vec3& axis, double limit) {
    Polygon out;
    if (poly.empty()) return out;
    for (std::size_t i = 0; i < poly.size(); ++i) {
        const Vec3& p = poly[i];
        const Vec3& q = poly[(i + 1) % poly.size()];
        const double dp = dot(axis, p - origin) - limit;
        const double dq = dot(axis, q - origin) - limit;
        if (dp <= 0.0) out.push_back(p);
        if ((dp < 0.0 && dq > 0.0) || (dp > 0.0 && dq < 0.0)) out.push_back(p + (q - p) * (dp / (dp - dq)));
    }
    return out;
}

// Projection radius of a box onto a unit axis.
double box_radius(const Pose& p, const Vec3& e, const Vec3& axis) {
    return e.x * std::abs(dot(p.axes[0], axis)) + e.y * std::abs(dot(p.axes[1], axis)) +
           e.z * std::abs(dot(p.axes[2], axis));
}

RawList box_box(const RigidBody& a, const Box& ba, const RigidBody& b, const Box& bb, double slop) {
    const Pose pa(a), pb(b);
    const Vec3 ea = ba.half_extents, eb = bb.half_extents;
    const Vec3 t = pa.x - pb.x;

    int face_axis = -1;
    double face_overlap = std::numeric_limits<double>::infinity();
    Vec3 face_n;
    for (int i = 0; i < 6; ++i) {
        const Vec3 l = i < 3 ? pa.axes[static_cast<std::size_t>(i)] : pb.axes[static_cast<std::size_t>(i - 3)];
        const double proj = dot(t, l);
        const double overlap = box_radius(pa, ea, l) + box_radius(pb, eb, l) - std::abs(proj);
        if (overlap <= -slop) return {};
        if (overlap < face_overlap) {
            face_overlap = overlap;
            face_axis = i;
            face_n = proj >= 0.0 ? l : -l;
        }
    }
    int edge_i = -1, edge_j = -1;
    double edge_overlap = std::numeric_limits<double>::infinity();
    Vec3 edge_n;
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            Vec3 l = cross(pa.axes[static_cast<std::size_t>(i)], pb.axes[static_cast<std::size_t>(j)]);
            const double len = length(l);
            if (len < 1e-6) continue;
            l /= len;
            const double proj = dot(t, l);
            const double overlap = box_radius(pa, ea, l) + box_radius(pb, eb, l) - std::abs(proj);
            if (overlap <= -slop) return {};
            if (overlap < edge_overlap) {
                edge_overlap = overlap;
                edge_i = i;
                edge_j = j;
                edge_n = proj >= 0.0 ? l : -l;
            }
        }
    }

    RawList out;
    if (edge_i >= 0 && edge_overlap < 0.95 * face_overlap - 1e-5) {
        const Vec3 n = edge_n;
        Vec3 ca = pa.x, cb = pb.x;
        for (int k = 0; k < 3; ++k) {
            const auto ks = static_cast<std::size_t>(k);
            if (k != edge_i) ca += pa.axes[ks] * (dot(pa.axes[ks], n) > 0.0 ? -ea[k] : ea[k]);
            if (k != edge_j) cb += pb.axes[ks] * (dot(pb.axes[ks], n) > 0.0 ? eb[k] : -eb[k]);
        }
        const Vec3 da = pa.axes[static_cast<std::size_t>(edge_i)] * ea[edge_i];
        const Vec3 db = pb.axes[static_cast<std::size_t>(edge_j)] * eb[edge_j];
        const SegmentClosest cl = closest_segment_segment(ca - da, ca + da, cb - db, cb + db);
        out.push_back({cl.c1, n, edge_overlap, 0.0, 0.0});
        return out;
    }

    const Vec3 n = face_n;
    const bool ref_is_a = face_axis < 3;
    const Pose& ref = ref_is_a ? pa : pb;
    const Pose& inc = ref_is_a ? pb : pa;
    const Vec3 er = ref_is_a ? ea : eb;
    const Vec3 ei = ref_is_a ? eb : ea;
    const int ra = ref_is_a ? face_axis : face_axis - 3;
    // outward normal of the reference face, facing the incident box
    const Vec3 nr = ref_is_a ? -n : n;
    const Vec3 ref_center = ref.x + nr * er[ra];

    int im = 0;
    double best = -1.0;
    for (int m = 0; m < 3; ++m) {
        const double d = std::abs(dot(inc.axes[static_cast<std::size_t>(m)], nr));
        if (d > best) {
            best = d;
            im = m;
        }
    }
    const Vec3 inc_axis = inc.axes[static_cast<std::size_t>(im)];
    const Vec3 inc_normal = dot(inc_axis, nr) > 0.0 ? -inc_axis : inc_axis;
    const Vec3 inc_center = inc.x + inc_normal * ei[im];
    const int u = (im + 1) % 3, v = (im + 2) % 3;
    const Vec3 du = inc.axes[static_cast<std::size_t>(u)] * ei[u];
    const Vec3 dv = inc.axes[static_cast<std::size_t>(v)] * ei[v];
    Polygon poly{inc_center + du + dv, inc_center - du + dv, inc_center - du - dv, inc_center + du - dv};

    for (int k = 1; k <= 2; ++k) {
        const int side = (ra + k) % 3;
        const Vec3 axis = ref.axes[static_cast<std::size_t>(side)];
        poly = clip(poly, ref.x, axis, er[side]);
        poly = clip(poly, ref.x, -axis, er[side]);
    }
    for (const Vec3& p : poly) {
        const double s = dot(p - ref_center, nr);
        const double depth = -s;
        if (depth <= -slop) continue;
        out.push_back({ref_is_a ? p - nr * s : p, n, depth, 0.0, 0.0});
    }
    reduce_manifold(out);
    return out;
}

RawList capsule_box(const RigidBody& a, const Capsule& c, const RigidBody& b, const Box& bx, double slop) {
    const Pose pb(b);
    const Vec3 e = bx.half_extents;
    Vec3 p0, p1;
    capsule_segment(a, c, p0, p1);
    const Vec3 seg = p1 - p0;
    const Vec3 u = normalized(seg);
    const Vec3 t = a.position - pb.x;

    std::vector<Vec3> axes{pb.axes[0], pb.axes[1], pb.axes[2]};
    // box axis index for segment x box-axis candidates, -1 otherwise
    std::vector<int> edge_of{-1, -1, -1};

    // direction between the closest features when the segment is outside the box
    auto dist_to_box = [&](const Vec3& p) {
        const Vec3 l = pb.to_local(p);
        const Vec3 q{std::clamp(l.x, -e.x, e.x), std::clamp(l.y, -e.y, e.y), std::clamp(l.z, -e.z, e.z)};
        return std::pair{length(l - q), pb.to_world(q)};
    };
    double lo = 0.0, hi = 1.0;
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    for (int it = 0; it < 80; ++it) {
        const double m1 = hi - g * (hi - lo);
        const double m2 = lo + g * (hi - lo);
        if (dist_to_box(p0 + seg * m1).first < dist_to_box(p0 + seg * m2).first)
            hi = m2;
        else
            lo = m1;
    }
    const Vec3 closest_seg = p0 + seg * (0.5 * (lo + hi));
    const auto [dist, closest_box] = dist_to_box(closest_seg);
    if (dist > 1e-9) {
        axes.push_back((closest_seg - closest_box) / dist);
        edge_of.push_back(-1);
    }
    for (int k = 0; k < 3; ++k) {
        const Vec3 l = cross(u, pb.axes[static_cast<std::size_t>(k)]);
        const double len = length(l);
        if (len > 1e-6) {
            axes.push_back(l / len);
            edge_of.push_back(k);
        }
    }

    double best = std::numeric_limits<double>::infinity();
    std::size_t best_i = 0;
    Vec3 n;
    for (std::size_t i = 0; i < axes.size(); ++i) {
        const double proj = dot(t, axes[i]);
        const double overlap =
            box_radius(pb, e, axes[i]) + c.half_length * std::abs(dot(u, axes[i])) + c.radius - std::abs(proj);
        if (overlap <= -slop) return {};
        if (overlap < best) {
            best = overlap;
            best_i = i;
            n = proj >= 0.0 ? axes[i] : -axes[i];
        }
    }

    const double box_top = dot(pb.x, n) + box_radius(pb, e, n);
    auto point_depth = [&](const Vec3& p) { return box_top - (dot(p, n) - c.radius); };

    RawList out;
    if (best_i < 3) {
        // face: clip the segment to the face rectangle, keep the clipped ends
        const int fa = static_cast<int>(best_i);
        const Vec3 l0 = pb.to_local(p0), l1 = pb.to_local(p1);
        double s0 = 0.0, s1 = 1.0;
        for (int k = 1; k <= 2; ++k) {
            const int ax = (fa + k) % 3;
            const double d = l1[ax] - l0[ax];
            for (double sign : {1.0, -1.0}) {
                // sign * (l0 + d s) <= e
                const double num = e[ax] - sign * l0[ax];
                const double den = sign * d;
                if (std::abs(den) < kEps) {
                    if (num < 0.0) s1 = -1.0;
                } else if (den > 0.0) {
                    s1 = std::min(s1, num / den);
                } else {
                    s0 = std::max(s0, num / den);
                }
            }
        }
        if (s0 <= s1) {
            const Vec3 c0 = p0 + seg * s0;
            const Vec3 c1 = p0 + seg * s1;
            for (const Vec3& p : {c0, c1}) {
                const double d = point_depth(p);
                if (d > -slop) out.push_back({p - n * c.radius, n, d, c.radius, 0.0});
            }
            if (out.size() == 2 && length_squared(out[0].point_a - out[1].point_a) < 1e-18) out.pop_back();
        }
    }
    if (out.empty()) {
        Vec3 deepest = dot(p0, n) <= dot(p1, n) ? p0 : p1;
        double d = point_depth(deepest);
        if (edge_of[best_i] >= 0) {
            // segment against the supporting box edge parallel to the crossed axis
            const int k = edge_of[best_i];
            Vec3 mid = pb.x;
            for (int m = 0; m < 3; ++m) {
                const auto ms = static_cast<std::size_t>(m);
                if (m != k) mid += pb.axes[ms] * (dot(pb.axes[ms], n) > 0.0 ? e[m] : -e[m]);
            }
            const Vec3 half = pb.axes[static_cast<std::size_t>(k)] * e[k];
            deepest = closest_segment_segment(p0, p1, mid - half, mid + half).c1;
            d = best;
        } else if (best_i >= 3) {
            deepest = closest_seg;
            d = best;
        }
        if (d > -slop) out.push_back({deepest - n * c.radius, n, d, c.radius, 0.0});
    }
    return out;
}

Contact to_contact(const Raw& r, const RigidBody& a, BodyId ia, const RigidBody& b, BodyId ib) {
    Contact c;
    c.body_a = ia;
    c.body_b = ib;
    c.normal = r.normal;
    c.depth = r.depth;
    const Vec3 point_b = r.point_a + r.normal * r.depth;
    c.point = (r.point_a + point_b) * 0.5;
    c.r_a_local = a.to_local(r.point_a);
    c.r_b_local = b.to_local(point_b);
    c.core_a_local = a.to_local(r.point_a + r.normal * r.radius_a);
    c.core_b_local = b.to_local(point_b - r.normal * r.radius_b);
    c.radius_a = r.radius_a;
    c.radius_b = r.radius_b;
    return c;
}

Contact flipped(const Contact& c) {
    Contact f = c;
    std::swap(f.body_a, f.body_b);
    std::swap(f.r_a_local, f.r_b_local);
    std::swap(f.core_a_local, f.core_b_local);
    std::swap(f.radius_a, f.radius_b);
    f.normal = -c.normal;
    return f;
}

// Dispatch for ordered kinds; returns false if the ordered pair has no routine.
bool dispatch(const RigidBody& a, const RigidBody& b, double slop, RawList& out) {
    const ColliderShape& sa = *a.collider;
    const ColliderShape& sb = *b.collider;
    const ShapeKind ka = kind_of(sa), kb = kind_of(sb);
    using K = ShapeKind;
    if (ka == K::Sphere) {
        const auto& s = std::get<Sphere>(sa);
        switch (kb) {
        case K::Sphere: out = sphere_sphere(a, s, b, std::get<Sphere>(sb), slop); return true;
        case K::HalfSpace: out = sphere_half_space(a, s, b, std::get<HalfSpace>(sb), slop); return true;
        case K::Box: out = sphere_box(a, s, b, std::get<Box>(sb), slop); return true;
        case K::Capsule: out = sphere_capsule(a, s, b, std::get<Capsule>(sb), slop); return true;
        }
    }
    if (ka == K::Box) {
        const auto& bx = std::get<Box>(sa);
        if (kb == K::HalfSpace) {
            out = box_half_space(a, bx, b, std::get<HalfSpace>(sb), slop);
            return true;
        }
        if (kb == K::Box) {
            out = box_box(a, bx, b, std::get<Box>(sb), slop);
            return true;
        }
    }
    if (ka == K::Capsule) {
        const auto& c = std::get<Capsule>(sa);
        switch (kb) {
        case K::HalfSpace: out = capsule_half_space(a, c, b, std::get<HalfSpace>(sb), slop); return true;
        case K::Capsule: out = capsule_capsule(a, c, b, std::get<Capsule>(sb), slop); return true;
        case K::Box: out = capsule_box(a, c, b, std::get<Box>(sb), slop); return true;
        default: break;
        }
    }
    return false;
}

} // namespace

std::vector<Contact> narrow_phase(const RigidBody& a, BodyId ia, const RigidBody& b, BodyId ib, double slop) {
    if (!a.collider || !b.collider) return {};
    const ShapeKind ka = kind_of(*a.collider), kb = kind_of(*b.collider);
    // same-kind pairs are evaluated with the lower id as body a
    const bool swap_same = ka == kb && ib < ia;
    RawList raw;
    if (!swap_same && dispatch(a, b, slop, raw)) {
        std::vector<Contact> out;
        out.reserve(raw.size());
        for (const Raw& r : raw) out.push_back(to_contact(r, a, ia, b, ib));
        return out;
    }
    if (dispatch(b, a, slop, raw)) {
        std::vector<Contact> out;
        out.reserve(raw.size());
        for (const Raw& r : raw) out.push_back(flipped(to_contact(r, b, ib, a, ia)));
        return out;
    }
    throw UnsupportedPair(std::string("no contact routine for ") + to_string(ka) + "/" + to_string(kb));
}

Vec3 current_witness_a(const Contact& c, const RigidBody& a) {
    return a.to_world(c.core_a_local) - c.normal * c.radius_a;
}

Vec3 current_witness_b(const Contact& c, const RigidBody& b) {
    return b.to_world(c.core_b_local) + c.normal * c.radius_b;
}

double current_depth(const Contact& c, const RigidBody& a, const RigidBody& b) {
    return dot(current_witness_b(c, b) - current_witness_a(c, a), c.normal);
}

bool contains_point(const RigidBody& body, const Vec3& p) {
    if (!body.collider) return false;
    return std::visit(
        [&](const auto& s) -> bool {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, Sphere>) {
                return length(p - body.position) < s.radius;
            } else if constexpr (std::is_same_v<T, Box>) {
                const Vec3 l = body.to_local(p);
                return std::abs(l.x) < s.half_extents.x && std::abs(l.y) < s.half_extents.y &&
                       std::abs(l.z) < s.half_extents.z;
            } else if constexpr (std::is_same_v<T, Capsule>) {
                Vec3 p0, p1;
                capsule_segment(body, s, p0, p1);
                return length(p - closest_on_segment(p, p0, p1)) < s.radius;
            } else {
                Vec3 n;
                double o = 0.0;
                half_space_world(body, s, n, o);
                return dot(n, p) < o;
            }
        },
        *body.collider);
}

Aabb swept_aabb(const RigidBody& body, const BroadPhaseParams& params) {
    double grow = params.margin;
    if (!body.is_static())
        grow += length(body.velocity) * params.dt + 0.5 * length(params.gravity) * params.dt * params.dt;
    const double r = bounding_radius(*body.collider) + grow;
    const Vec3 ext{r, r, r};
    return {body.position - ext, body.position + ext};
}

bool aabb_reaches_half_space(const Aabb& box, const RigidBody& plane_body) {
    Vec3 n;
    double o = 0.0;
    half_space_world(plane_body, std::get<HalfSpace>(*plane_body.collider), n, o);
    // corner furthest into the half-space
    const Vec3 corner{n.x > 0.0 ? box.min.x : box.max.x, n.y > 0.0 ? box.min.y : box.max.y,
                      n.z > 0.0 ? box.min.z : box.max.z};
    return dot(n, corner) <= o;
}

bool may_collide(const RigidBody& a, const RigidBody& b, BodyId ia, BodyId ib, const CollisionFilter& filter) {
    if (ia == ib || !a.collider || !b.collider) return false;
    if (a.is_static() && b.is_static()) return false;
    return filter.allows(ia, ib);
}

std::vector<CandidatePair> broad_phase(std::span<const RigidBody> bodies, const BroadPhaseParams& params,
                                       const CollisionFilter& filter) {
    std::vector<BodyId> bounded, planes;
    for (std::size_t i = 0; i < bodies.size(); ++i) {
        const auto& b = bodies[i];
        if (!b.collider) continue;
        (kind_of(*b.collider) == ShapeKind::HalfSpace ? planes : bounded).push_back(static_cast<BodyId>(i));
    }
    std::vector<Aabb> boxes(bodies.size());
    for (BodyId i : bounded) boxes[i] = swept_aabb(bodies[i], params);

    // axis of largest center variance
    int axis = 0;
    if (!bounded.empty()) {
        Vec3 mean, sq;
        for (BodyId i : bounded) {
            const Vec3 c = (boxes[i].min + boxes[i].max) * 0.5;
            mean += c;
            sq += cwise_mul(c, c);
        }
        const double n = static_cast<double>(bounded.size());
        mean /= n;
        const Vec3 var = sq / n - cwise_mul(mean, mean);
        if (var.y > var[axis]) axis = 1;
        if (var.z > var[axis]) axis = 2;
    }

    std::vector<BodyId> order = bounded;
    std::sort(order.begin(), order.end(), [&](BodyId l, BodyId r) {
        if (boxes[l].min[axis] != boxes[r].min[axis]) return boxes[l].min[axis] < boxes[r].min[axis];
        return l < r;
    });

    std::vector<CandidatePair> pairs;
    for (std::size_t i = 0; i < order.size(); ++i) {
        const Aabb& bi = boxes[order[i]];
        for (std::size_t j = i + 1; j < order.size(); ++j) {
            const Aabb& bj = boxes[order[j]];
            if (bj.min[axis] > bi.max[axis]) break;
            if (!bi.overlaps(bj)) continue;
            if (!may_collide(bodies[order[i]], bodies[order[j]], order[i], order[j], filter)) continue;
            pairs.push_back(CandidatePair::make(order[i], order[j]));
        }
    }
    for (BodyId p : planes) {
        for (BodyId i : bounded) {
            if (!may_collide(bodies[p], bodies[i], p, i, filter)) continue;
            if (aabb_reaches_half_space(boxes[i], bodies[p])) pairs.push_back(CandidatePair::make(p, i));
        }
    }
    std::sort(pairs.begin(), pairs.end());
    return pairs;
}

} // namespace pbrbd
