#pragma once

#include <unordered_map>
#include <vector>

#include "ribbon/mesh.hpp"

namespace ribbon {

// Uniform-grid accelerator for exact nearest-vertex queries.
// Ties are broken by the lowest vertex index, matching a brute-force scan.
class VertexGrid {
 public:
    explicit VertexGrid(const Points& points, double cell_size = 0.0);

    Eigen::Index nearest(const Vec3& query) const;

 private:
    struct CellKey {
        int x, y, z;
        bool operator==(const CellKey& o) const { return x == o.x && y == o.y && z == o.z; }
    };
    struct CellHash {
        size_t operator()(const CellKey& k) const {
            size_t h = static_cast<size_t>(k.x) * 73856093u;
            h ^= static_cast<size_t>(k.y) * 19349663u;
            h ^= static_cast<size_t>(k.z) * 83492791u;
            return h;
        }
    };

    CellKey cell_of(const Vec3& p) const;

    const Points points_;
    Vec3 origin_;
    double cell_ = 1.0;
    std::unordered_map<CellKey, std::vector<int>, CellHash> cells_;
};

}  // namespace ribbon
