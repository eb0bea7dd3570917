#pragma once

// Geometric predicates for mesh audits: triangle-triangle intersection,
// nearest-vertex queries and self-intersection search.

#include <array>
#include <unordered_map>
#include <vector>

#include "scherk/vec.hpp"

namespace scherk::geom {

// Möller's interval test. Touching (shared edges/vertices) counts as intersecting,
// so callers must drop adjacent pairs first.
bool triangles_intersect(const std::array<Vec3, 3>& a, const std::array<Vec3, 3>& b);

// Uniform-hash nearest neighbour over a fixed point set.
class PointIndex {
public:
    PointIndex(const std::vector<Vec3>& pts, double cell);
    // Distance to the nearest stored point; searches at most `max_rings` cell
    // shells, then falls back to a linear scan.
    double nearest(const Vec3& q, int max_rings = 8) const;
    size_t size() const { return pts_.size(); }

private:
    struct Key {
        long long x, y, z;
        bool operator==(const Key&) const = default;
    };
    struct KeyHash {
        size_t operator()(const Key& k) const {
            return size_t(k.x * 73856093LL ^ k.y * 19349663LL ^ k.z * 83492791LL);
        }
    };
    std::vector<Vec3> pts_;
    double cell_;
    std::unordered_map<Key, std::vector<int>, KeyHash> cells_;
};

struct SelfIntersection {
    long long pairs_tested = 0;
    long long hits = 0;
    int first_a = -1, first_b = -1;
};

// All pairs of faces that share no vertex and whose bounding boxes overlap.
SelfIntersection find_self_intersections(const std::vector<Vec3>& v, const std::vector<std::array<int, 3>>& f);

}  // namespace scherk::geom
