#include "ribbon/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <utility>

namespace ribbon {

void validate_mesh(const TriMesh& m, double area_epsilon) {
    const Eigen::Index nv = m.vertex_count();
    const Eigen::Index nf = m.face_count();
    if (nv == 0) throw MeshError("mesh has no vertices");
    if (!m.vertices.allFinite()) throw MeshError("non-finite vertex coordinate");

    for (Eigen::Index f = 0; f < nf; ++f) {
        const int a = m.faces(f, 0), b = m.faces(f, 1), c = m.faces(f, 2);
        if (a < 0 || b < 0 || c < 0 || a >= nv || b >= nv || c >= nv)
            throw MeshError("face " + std::to_string(f) + ": vertex index out of range");
        if (a == b || b == c || a == c)
            throw MeshError("face " + std::to_string(f) + ": repeated vertex");
        const double area = weighted_face_normal(m.vertices.row(a), m.vertices.row(b),
                                                 m.vertices.row(c)).norm();
        if (area <= area_epsilon)
            throw MeshError("face " + std::to_string(f) + ": degenerate (area " +
                            std::to_string(area) + ")");
    }

    // Orientation: a directed edge may appear at most once, and an interior
    // edge must be traversed in opposite directions by its two faces.
    std::map<std::pair<int, int>, int> directed;
    for (Eigen::Index f = 0; f < nf; ++f) {
        for (int e = 0; e < 3; ++e) {
            const int u = m.faces(f, e), v = m.faces(f, (e + 1) % 3);
            auto [it, inserted] = directed.emplace(std::make_pair(u, v), static_cast<int>(f));
            if (!inserted)
                throw MeshError("face " + std::to_string(f) + ": edge (" + std::to_string(u) +
                                "," + std::to_string(v) + ") traversed twice; inconsistent "
                                "orientation (also face " + std::to_string(it->second) + ")");
        }
    }
}

Points face_normals(const TriMesh& m) {
    Points n(m.face_count(), 3);
    for (Eigen::Index f = 0; f < m.face_count(); ++f) {
        const Vec3 wn = weighted_face_normal(m.vertices.row(m.faces(f, 0)),
                                             m.vertices.row(m.faces(f, 1)),
                                             m.vertices.row(m.faces(f, 2)));
        const double a = wn.norm();
        if (a <= kAreaEpsilon)
            throw MeshError("face " + std::to_string(f) + ": degenerate normal");
        n.row(f) = wn / a;
    }
    return n;
}

Eigen::VectorXd face_areas(const TriMesh& m) {
    Eigen::VectorXd a(m.face_count());
    for (Eigen::Index f = 0; f < m.face_count(); ++f)
        a[f] = weighted_face_normal(m.vertices.row(m.faces(f, 0)),
                                    m.vertices.row(m.faces(f, 1)),
                                    m.vertices.row(m.faces(f, 2))).norm();
    return a;
}

Points face_barycenters(const TriMesh& m) {
    Points c(m.face_count(), 3);
    for (Eigen::Index f = 0; f < m.face_count(); ++f)
        c.row(f) = (m.vertices.row(m.faces(f, 0)) + m.vertices.row(m.faces(f, 1)) +
                    m.vertices.row(m.faces(f, 2))) / 3.0;
    return c;
}

namespace {

// Sum of incident area-weighted face normals, before normalization.
Points accumulated_vertex_normals(const TriMesh& m) {
    Points acc = Points::Zero(m.vertex_count(), 3);
    for (Eigen::Index f = 0; f < m.face_count(); ++f) {
        const Vec3 wn = weighted_face_normal(m.vertices.row(m.faces(f, 0)),
                                             m.vertices.row(m.faces(f, 1)),
                                             m.vertices.row(m.faces(f, 2)));
        for (int e = 0; e < 3; ++e) acc.row(m.faces(f, e)) += wn;
    }
    return acc;
}

}  // namespace

Points vertex_normals(const TriMesh& m) {
    Points acc = accumulated_vertex_normals(m);
    std::vector<char> touched(m.vertex_count(), 0);
    for (Eigen::Index f = 0; f < m.face_count(); ++f)
        for (int e = 0; e < 3; ++e) touched[m.faces(f, e)] = 1;
    Points n(m.vertex_count(), 3);
    for (Eigen::Index i = 0; i < m.vertex_count(); ++i) {
        if (!touched[i]) throw MeshError("vertex " + std::to_string(i) + ": isolated");
        const double len = acc.row(i).norm();
        if (len <= kAreaEpsilon)
            throw MeshError("vertex " + std::to_string(i) + ": zero-length normal average");
        n.row(i) = acc.row(i) / len;
    }
    return n;
}

Points vertex_normals_pullback(const TriMesh& m, const Points& cotangent) {
    const Points acc = accumulated_vertex_normals(m);
    // Cotangent on the unnormalized accumulated normals.
    Points w(m.vertex_count(), 3);
    for (Eigen::Index i = 0; i < m.vertex_count(); ++i) {
        const double len = acc.row(i).norm();
        if (len <= kAreaEpsilon) {
            w.row(i).setZero();
            continue;
        }
        const Vec3 n = acc.row(i) / len;
        const Vec3 z = cotangent.row(i);
        w.row(i) = (z - n * n.dot(z)) / len;
    }
    Points grad = Points::Zero(m.vertex_count(), 3);
    for (Eigen::Index f = 0; f < m.face_count(); ++f) {
        const int ia = m.faces(f, 0), ib = m.faces(f, 1), ic = m.faces(f, 2);
        const Vec3 e1 = m.vertices.row(ib) - m.vertices.row(ia);
        const Vec3 e2 = m.vertices.row(ic) - m.vertices.row(ia);
        const Vec3 wf = w.row(ia) + w.row(ib) + w.row(ic);
        const Vec3 gb = 0.5 * e2.cross(wf);
        const Vec3 gc = 0.5 * wf.cross(e1);
        grad.row(ib) += gb;
        grad.row(ic) += gc;
        grad.row(ia) -= gb + gc;
    }
    return grad;
}

std::vector<char> boundary_vertices(const TriMesh& m) {
    std::map<std::pair<int, int>, int> undirected;
    for (Eigen::Index f = 0; f < m.face_count(); ++f) {
        for (int e = 0; e < 3; ++e) {
            int u = m.faces(f, e), v = m.faces(f, (e + 1) % 3);
            if (u > v) std::swap(u, v);
            undirected[{u, v}] += 1;
        }
    }
    std::vector<char> on_boundary(m.vertex_count(), 0);
    for (const auto& [edge, count] : undirected) {
        if (count == 1) {
            on_boundary[edge.first] = 1;
            on_boundary[edge.second] = 1;
        }
    }
    return on_boundary;
}

std::vector<std::vector<int>> vertex_adjacency(const TriMesh& m) {
    std::vector<std::vector<int>> adj(m.vertex_count());
    for (Eigen::Index f = 0; f < m.face_count(); ++f) {
        for (int e = 0; e < 3; ++e) {
            const int u = m.faces(f, e), v = m.faces(f, (e + 1) % 3);
            adj[u].push_back(v);
            adj[v].push_back(u);
        }
    }
    for (auto& nbrs : adj) {
        std::sort(nbrs.begin(), nbrs.end());
        nbrs.erase(std::unique(nbrs.begin(), nbrs.end()), nbrs.end());
    }
    return adj;
}

double bounding_box_diagonal(const Points& v) {
    if (v.rows() == 0) return 0.0;
    const Vec3 lo = v.colwise().minCoeff();
    const Vec3 hi = v.colwise().maxCoeff();
    return (hi - lo).norm();
}

double median_edge_length(const TriMesh& m) {
    std::map<std::pair<int, int>, char> seen;
    std::vector<double> lengths;
    for (Eigen::Index f = 0; f < m.face_count(); ++f) {
        for (int e = 0; e < 3; ++e) {
            int u = m.faces(f, e), v = m.faces(f, (e + 1) % 3);
            if (u > v) std::swap(u, v);
            if (seen.emplace(std::make_pair(u, v), 1).second)
                lengths.push_back((m.vertices.row(u) - m.vertices.row(v)).norm());
        }
    }
    if (lengths.empty()) throw MeshError("mesh has no edges");
    std::sort(lengths.begin(), lengths.end());
    return lengths[lengths.size() / 2];
}

double max_edge_length(const TriMesh& m) {
    double best = 0.0;
    for (Eigen::Index f = 0; f < m.face_count(); ++f)
        for (int e = 0; e < 3; ++e)
            best = std::max(best, (m.vertices.row(m.faces(f, e)) -
                                   m.vertices.row(m.faces(f, (e + 1) % 3))).norm());
    return best;
}

double inward_orientation_fraction(const SurfacePair& pair) {
    const Points n = vertex_normals(pair.inner);
    Eigen::Index positive = 0;
    for (Eigen::Index i = 0; i < pair.inner.vertex_count(); ++i) {
        // exact nearest outer vertex, ties by lowest index
        double best = std::numeric_limits<double>::infinity();
        Eigen::Index best_j = 0;
        for (Eigen::Index j = 0; j < pair.outer.vertex_count(); ++j) {
            const double d = (pair.outer.vertices.row(j) - pair.inner.vertices.row(i)).squaredNorm();
            if (d < best) {
                best = d;
                best_j = j;
            }
        }
        const Vec3 to_outer = pair.outer.vertices.row(best_j) - pair.inner.vertices.row(i);
        // coincident surfaces (identity registration) count as oriented
        if (to_outer.squaredNorm() == 0.0 || n.row(i).dot(to_outer) > 0.0) ++positive;
    }
    return static_cast<double>(positive) / static_cast<double>(pair.inner.vertex_count());
}

void validate_pair(const SurfacePair& pair) {
    validate_mesh(pair.inner);
    validate_mesh(pair.outer);
    const double frac = inward_orientation_fraction(pair);
    if (frac < 0.9)
        throw MeshError("inner-surface normals point away from the outer surface for " +
                        std::to_string(100.0 * (1.0 - frac)) +
                        "% of vertices; flip the inner mesh orientation");
}

}  // namespace ribbon
