#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace ribbon {

using Vec3 = Eigen::Vector3d;
using Points = Eigen::Matrix<double, Eigen::Dynamic, 3>;
using Faces = Eigen::Matrix<int, Eigen::Dynamic, 3>;

inline constexpr double kAreaEpsilon = 1e-12;  // mm^2

struct MeshError : std::runtime_error {
    explicit MeshError(const std::string& what) : std::runtime_error(what) {}
};

// Open triangulated surface. CCW winding defines the face normal.
struct TriMesh {
    Points vertices;  // mm
    Faces faces;

    Eigen::Index vertex_count() const { return vertices.rows(); }
    Eigen::Index face_count() const { return faces.rows(); }
};

// Inner/outer surface pair; units are mm throughout.
struct SurfacePair {
    TriMesh inner;
    TriMesh outer;
};

// Throws MeshError on out-of-range index, repeated vertex in a face,
// near-zero area, or inconsistent winding across an interior edge.
void validate_mesh(const TriMesh& m, double area_epsilon = kAreaEpsilon);

// 0.5 * (b-a) x (c-a): direction is the face normal, norm is the face area.
inline Vec3 weighted_face_normal(const Vec3& a, const Vec3& b, const Vec3& c) {
    return 0.5 * (b - a).cross(c - a);
}

Points face_normals(const TriMesh& m);          // unit, one per face
Eigen::VectorXd face_areas(const TriMesh& m);   // mm^2
Points face_barycenters(const TriMesh& m);

// Area-weighted average of incident face normals, renormalized.
// Throws on isolated vertices and on zero-length averages (fold-back).
Points vertex_normals(const TriMesh& m);

// Pulls a cotangent on the unit vertex normals back to vertex positions.
Points vertex_normals_pullback(const TriMesh& m, const Points& cotangent);

// true for vertices incident to an edge with exactly one incident face
std::vector<char> boundary_vertices(const TriMesh& m);

std::vector<std::vector<int>> vertex_adjacency(const TriMesh& m);

double bounding_box_diagonal(const Points& v);
double median_edge_length(const TriMesh& m);
double max_edge_length(const TriMesh& m);

// Fraction of inner vertices whose normal points toward the nearest outer
// vertex. Below 0.9 the pair is rejected with a "flip orientation" hint.
double inward_orientation_fraction(const SurfacePair& pair);
void validate_pair(const SurfacePair& pair);

}  // namespace ribbon
