#include "ribbon/spatial_grid.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace ribbon {

VertexGrid::VertexGrid(const Points& points, double cell_size) : points_(points) {
    if (points_.rows() == 0) throw std::invalid_argument("VertexGrid: empty point set");
    origin_ = points_.colwise().minCoeff();
    if (cell_size > 0.0) {
        cell_ = cell_size;
    } else {
        const double diag = bounding_box_diagonal(points_);
        const double n3 = std::cbrt(static_cast<double>(points_.rows()));
        cell_ = std::max(diag / std::max(n3, 1.0), 1e-9);
    }
    for (Eigen::Index i = 0; i < points_.rows(); ++i)
        cells_[cell_of(points_.row(i))].push_back(static_cast<int>(i));
}

VertexGrid::CellKey VertexGrid::cell_of(const Vec3& p) const {
    const Vec3 rel = (p - origin_) / cell_;
    return {static_cast<int>(std::floor(rel.x())), static_cast<int>(std::floor(rel.y())),
            static_cast<int>(std::floor(rel.z()))};
}

Eigen::Index VertexGrid::nearest(const Vec3& query) const {
    const CellKey center = cell_of(query);
    double best_d2 = std::numeric_limits<double>::infinity();
    Eigen::Index best = -1;

    auto visit = [&](int cx, int cy, int cz) {
        const auto it = cells_.find(CellKey{cx, cy, cz});
        if (it == cells_.end()) return;
        for (const int i : it->second) {
            const double d2 = (points_.row(i).transpose() - query).squaredNorm();
            if (d2 < best_d2 || (d2 == best_d2 && i < best)) {
                best_d2 = d2;
                best = i;
            }
        }
    };

    // expanding cubic shells; a shell at distance s can only contain points
    // closer than best once (s-1)*cell exceeds the current best distance
    for (int shell = 0;; ++shell) {
        if (best >= 0) {
            const double min_possible = (shell - 1) * cell_;
            if (min_possible > 0.0 && min_possible * min_possible > best_d2) break;
        }
        bool any_cell_in_range = false;
        for (int dx = -shell; dx <= shell; ++dx) {
            for (int dy = -shell; dy <= shell; ++dy) {
                for (int dz = -shell; dz <= shell; ++dz) {
                    if (std::max({std::abs(dx), std::abs(dy), std::abs(dz)}) != shell) continue;
                    any_cell_in_range = true;
                    visit(center.x + dx, center.y + dy, center.z + dz);
                }
            }
        }
        if (!any_cell_in_range && best >= 0) break;
        if (shell > 1 && best < 0 && cells_.size() > 0 && shell > 4) {
            // sparse far-away query: fall back to a full scan
            for (Eigen::Index i = 0; i < points_.rows(); ++i) {
                const double d2 = (points_.row(i).transpose() - query).squaredNorm();
                if (d2 < best_d2 || (d2 == best_d2 && i < best)) {
                    best_d2 = d2;
                    best = i;
                }
            }
            break;
        }
    }
    return best;
}

}  // namespace ribbon
