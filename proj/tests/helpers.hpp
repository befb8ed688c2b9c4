#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <random>
#include <vector>

#include <Eigen/Geometry>

#include "ribbon/mesh.hpp"

namespace ribbon::testing {

inline Faces grid_faces(int rows, int cols) {
    Faces f(2 * (rows - 1) * (cols - 1), 3);
    Eigen::Index idx = 0;
    auto at = [cols](int i, int j) { return i * cols + j; };
    for (int i = 0; i + 1 < rows; ++i)
        for (int j = 0; j + 1 < cols; ++j) {
            f.row(idx++) << at(i, j), at(i + 1, j), at(i + 1, j + 1);
            f.row(idx++) << at(i, j), at(i + 1, j + 1), at(i, j + 1);
        }
    return f;
}

// Mildly jittered plate: stays a valid oriented mesh for jitter < ~0.3.
inline TriMesh jittered_plate(int rows, int cols, double jitter, unsigned seed,
                              double spacing = 1.0) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    TriMesh m;
    m.vertices.resize(rows * cols, 3);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j)
            m.vertices.row(i * cols + j) << i * spacing + jitter * unit(rng),
                j * spacing + jitter * unit(rng), jitter * unit(rng);
    m.faces = grid_faces(rows, cols);
    return m;
}

struct RigidMotion {
    Eigen::Matrix3d rotation;
    Vec3 translation;
};

inline RigidMotion random_rigid(unsigned seed) {
    std::mt19937 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Vec3 axis(gauss(rng), gauss(rng), gauss(rng));
    axis.normalize();
    const double angle = std::uniform_real_distribution<double>(0.2, 2.8)(rng);
    RigidMotion m;
    m.rotation = Eigen::AngleAxisd(angle, axis).toRotationMatrix();
    m.translation = Vec3(gauss(rng), gauss(rng), gauss(rng)) * 3.0;
    return m;
}

inline TriMesh apply_rigid(const TriMesh& mesh, const RigidMotion& m) {
    TriMesh out = mesh;
    out.vertices = (mesh.vertices * m.rotation.transpose()).rowwise() +
                   m.translation.transpose();
    return out;
}

// Icosphere by midpoint subdivision, projected back to radius r.
inline TriMesh icosphere(double r, int subdivisions) {
    const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
    std::vector<Vec3> verts = {{-1, phi, 0}, {1, phi, 0},  {-1, -phi, 0}, {1, -phi, 0},
                               {0, -1, phi}, {0, 1, phi},  {0, -1, -phi}, {0, 1, -phi},
                               {phi, 0, -1}, {phi, 0, 1},  {-phi, 0, -1}, {-phi, 0, 1}};
    for (auto& v : verts) v = v.normalized() * r;
    std::vector<std::array<int, 3>> faces = {
        {0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11}, {1, 5, 9},
        {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},  {3, 9, 4},   {3, 4, 2},
        {3, 2, 6},  {3, 6, 8},  {3, 8, 9},   {4, 9, 5},  {2, 4, 11},  {6, 2, 10},
        {8, 6, 7},  {9, 8, 1}};
    for (int s = 0; s < subdivisions; ++s) {
        std::map<std::pair<int, int>, int> midpoint;
        auto mid = [&](int a, int b) {
            auto key = std::minmax(a, b);
            auto it = midpoint.find(key);
            if (it != midpoint.end()) return it->second;
            const Vec3 m = ((verts[a] + verts[b]) / 2.0).normalized() * r;
            verts.push_back(m);
            const int idx = static_cast<int>(verts.size()) - 1;
            midpoint[key] = idx;
            return idx;
        };
        std::vector<std::array<int, 3>> next;
        for (const auto& f : faces) {
            const int ab = mid(f[0], f[1]), bc = mid(f[1], f[2]), ca = mid(f[2], f[0]);
            next.push_back({f[0], ab, ca});
            next.push_back({f[1], bc, ab});
            next.push_back({f[2], ca, bc});
            next.push_back({ab, bc, ca});
        }
        faces = std::move(next);
    }
    TriMesh m;
    m.vertices.resize(verts.size(), 3);
    for (size_t i = 0; i < verts.size(); ++i) m.vertices.row(i) = verts[i];
    m.faces.resize(faces.size(), 3);
    for (size_t f = 0; f < faces.size(); ++f)
        m.faces.row(f) << faces[f][0], faces[f][1], faces[f][2];
    return m;
}

}  // namespace ribbon::testing
