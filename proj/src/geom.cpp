#include "scherk/geom.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

namespace scherk::geom {

namespace {

// Interval of a triangle's intersection with the other triangle's plane,
// projected on the line direction axis.
bool interval(double p0, double p1, double p2, double d0, double d1, double d2, double& t0, double& t1) {
    auto isect = [](double pa, double pb, double da, double db) { return pa + (pb - pa) * da / (da - db); };
    if (d0 * d1 > 0) {  // 2 alone
        t0 = isect(p2, p0, d2, d0);
        t1 = isect(p2, p1, d2, d1);
    } else if (d0 * d2 > 0) {  // 1 alone
        t0 = isect(p1, p0, d1, d0);
        t1 = isect(p1, p2, d1, d2);
    } else if (d1 * d2 > 0 || d0 != 0) {  // 0 alone
        t0 = isect(p0, p1, d0, d1);
        t1 = isect(p0, p2, d0, d2);
    } else if (d1 != 0) {
        t0 = isect(p1, p0, d1, d0);
        t1 = isect(p1, p2, d1, d2);
    } else if (d2 != 0) {
        t0 = isect(p2, p0, d2, d0);
        t1 = isect(p2, p1, d2, d1);
    } else {
        return false;  // coplanar
    }
    if (t0 > t1) std::swap(t0, t1);
    return true;
}

bool edge_edge_2d(double ax, double ay, double bx, double by, double cx, double cy, double dx, double dy) {
    auto orient = [](double px, double py, double qx, double qy, double rx, double ry) {
        return (qx - px) * (ry - py) - (qy - py) * (rx - px);
    };
    const double o1 = orient(ax, ay, bx, by, cx, cy), o2 = orient(ax, ay, bx, by, dx, dy);
    const double o3 = orient(cx, cy, dx, dy, ax, ay), o4 = orient(cx, cy, dx, dy, bx, by);
    return o1 * o2 <= 0 && o3 * o4 <= 0;
}

bool point_in_tri_2d(double px, double py, const double* t) {
    auto s = [&](int i, int j) { return (t[2 * j] - t[2 * i]) * (py - t[2 * i + 1]) - (t[2 * j + 1] - t[2 * i + 1]) * (px - t[2 * i]); };
    const double a = s(0, 1), b = s(1, 2), c = s(2, 0);
    return (a >= 0 && b >= 0 && c >= 0) || (a <= 0 && b <= 0 && c <= 0);
}

bool coplanar(const Vec3& n, const std::array<Vec3, 3>& a, const std::array<Vec3, 3>& b) {
    // Project on the dominant plane.
    int i0 = 0, i1 = 1;
    const double ax = std::fabs(n.x), ay = std::fabs(n.y), az = std::fabs(n.z);
    if (ax > ay && ax > az) { i0 = 1; i1 = 2; }
    else if (ay > az) { i0 = 0; i1 = 2; }
    double ta[6], tb[6];
    for (int i = 0; i < 3; ++i) {
        ta[2 * i] = a[i][i0]; ta[2 * i + 1] = a[i][i1];
        tb[2 * i] = b[i][i0]; tb[2 * i + 1] = b[i][i1];
    }
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            if (edge_edge_2d(ta[2 * i], ta[2 * i + 1], ta[2 * ((i + 1) % 3)], ta[2 * ((i + 1) % 3) + 1], tb[2 * j],
                             tb[2 * j + 1], tb[2 * ((j + 1) % 3)], tb[2 * ((j + 1) % 3) + 1]))
                return true;
    return point_in_tri_2d(ta[0], ta[1], tb) || point_in_tri_2d(tb[0], tb[1], ta);
}

}  // namespace

bool triangles_intersect(const std::array<Vec3, 3>& a, const std::array<Vec3, 3>& b) {
    const Vec3 n2 = cross(b[1] - b[0], b[2] - b[0]);
    const double d2 = -dot(n2, b[0]);
    double da[3];
    for (int i = 0; i < 3; ++i) da[i] = dot(n2, a[i]) + d2;
    if ((da[0] > 0 && da[1] > 0 && da[2] > 0) || (da[0] < 0 && da[1] < 0 && da[2] < 0)) return false;

    const Vec3 n1 = cross(a[1] - a[0], a[2] - a[0]);
    const double d1 = -dot(n1, a[0]);
    double db[3];
    for (int i = 0; i < 3; ++i) db[i] = dot(n1, b[i]) + d1;
    if ((db[0] > 0 && db[1] > 0 && db[2] > 0) || (db[0] < 0 && db[1] < 0 && db[2] < 0)) return false;

    if (da[0] == 0 && da[1] == 0 && da[2] == 0) return coplanar(n1, a, b);

    const Vec3 D = cross(n1, n2);
    int ax = 0;
    double m = std::fabs(D.x);
    if (std::fabs(D.y) > m) { m = std::fabs(D.y); ax = 1; }
    if (std::fabs(D.z) > m) ax = 2;
    double s0, s1, t0, t1;
    if (!interval(a[0][ax], a[1][ax], a[2][ax], da[0], da[1], da[2], s0, s1)) return coplanar(n1, a, b);
    if (!interval(b[0][ax], b[1][ax], b[2][ax], db[0], db[1], db[2], t0, t1)) return coplanar(n1, a, b);
    return !(s1 < t0 || t1 < s0);
}

// ---------------------------------------------------------------------------

PointIndex::PointIndex(const std::vector<Vec3>& pts, double cell) : pts_(pts), cell_(cell) {
    for (size_t i = 0; i < pts_.size(); ++i)
        cells_[{(long long)std::floor(pts_[i].x / cell), (long long)std::floor(pts_[i].y / cell),
                (long long)std::floor(pts_[i].z / cell)}]
            .push_back(int(i));
}

double PointIndex::nearest(const Vec3& q, int max_rings) const {
    const long long cx = (long long)std::floor(q.x / cell_), cy = (long long)std::floor(q.y / cell_),
                    cz = (long long)std::floor(q.z / cell_);
    double best = std::numeric_limits<double>::infinity();
    for (int r = 0; r <= max_rings; ++r) {
        // Anything beyond shell r-1 is at least (r-1) cells away.
        if (best <= (r - 1) * cell_) return best;
        for (long long dx = -r; dx <= r; ++dx)
            for (long long dy = -r; dy <= r; ++dy)
                for (long long dz = -r; dz <= r; ++dz) {
                    if (std::max({std::llabs(dx), std::llabs(dy), std::llabs(dz)}) != r) continue;
                    auto it = cells_.find({cx + dx, cy + dy, cz + dz});
                    if (it == cells_.end()) continue;
                    for (int id : it->second) best = std::min(best, norm(pts_[id] - q));
                }
    }
    if (best <= max_rings * cell_) return best;
    for (const auto& p : pts_) best = std::min(best, norm(p - q));
    return best;
}

// ---------------------------------------------------------------------------

SelfIntersection find_self_intersections(const std::vector<Vec3>& v, const std::vector<std::array<int, 3>>& f) {
    SelfIntersection out;
    if (f.empty()) return out;
    struct Box {
        Vec3 lo, hi;
    };
    std::vector<Box> box(f.size());
    double mean = 0;
    for (size_t i = 0; i < f.size(); ++i) {
        Box b{v[f[i][0]], v[f[i][0]]};
        for (int j = 1; j < 3; ++j) {
            const Vec3& p = v[f[i][j]];
            b.lo = {std::min(b.lo.x, p.x), std::min(b.lo.y, p.y), std::min(b.lo.z, p.z)};
            b.hi = {std::max(b.hi.x, p.x), std::max(b.hi.y, p.y), std::max(b.hi.z, p.z)};
        }
        box[i] = b;
        mean += std::max({b.hi.x - b.lo.x, b.hi.y - b.lo.y, b.hi.z - b.lo.z});
    }
    const double cell = std::max(2.0 * mean / f.size(), 1e-12);
    struct Key {
        long long x, y, z;
        bool operator==(const Key&) const = default;
    };
    struct H {
        size_t operator()(const Key& k) const { return size_t(k.x * 73856093LL ^ k.y * 19349663LL ^ k.z * 83492791LL); }
    };
    std::unordered_map<Key, std::vector<int>, H> grid;
    auto cell_of = [&](double t) { return (long long)std::floor(t / cell); };
    for (size_t i = 0; i < f.size(); ++i) {
        const Box& b = box[i];
        for (long long x = cell_of(b.lo.x); x <= cell_of(b.hi.x); ++x)
            for (long long y = cell_of(b.lo.y); y <= cell_of(b.hi.y); ++y)
                for (long long z = cell_of(b.lo.z); z <= cell_of(b.hi.z); ++z) grid[{x, y, z}].push_back(int(i));
    }
    std::vector<int> seen(f.size(), -1);
    for (size_t i = 0; i < f.size(); ++i) {
        const Box& bi = box[i];
        for (long long x = cell_of(bi.lo.x); x <= cell_of(bi.hi.x); ++x)
            for (long long y = cell_of(bi.lo.y); y <= cell_of(bi.hi.y); ++y)
                for (long long z = cell_of(bi.lo.z); z <= cell_of(bi.hi.z); ++z) {
                    auto it = grid.find({x, y, z});
                    if (it == grid.end()) continue;
                    for (int j : it->second) {
                        if (size_t(j) <= i || seen[j] == int(i)) continue;
                        seen[j] = int(i);
                        const Box& bj = box[j];
                        if (bi.hi.x < bj.lo.x || bj.hi.x < bi.lo.x || bi.hi.y < bj.lo.y || bj.hi.y < bi.lo.y ||
                            bi.hi.z < bj.lo.z || bj.hi.z < bi.lo.z)
                            continue;
                        bool shared = false;
                        for (int a : f[i])
                            for (int b : f[j]) shared |= a == b;
                        if (shared) continue;
                        ++out.pairs_tested;
                        if (triangles_intersect({v[f[i][0]], v[f[i][1]], v[f[i][2]]},
                                                {v[f[j][0]], v[f[j][1]], v[f[j][2]]})) {
                            if (out.hits++ == 0) {
                                out.first_a = int(i);
                                out.first_b = int(j);
                            }
                        }
                    }
                }
    }
    return out;
}

}  // namespace scherk::geom
