#include "ribbon/synthetic.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace ribbon {

namespace {

Faces grid_faces(int n) {
    Faces f(2 * (n - 1) * (n - 1), 3);
    Eigen::Index idx = 0;
    auto at = [n](int i, int j) { return i * n + j; };
    for (int i = 0; i + 1 < n; ++i) {
        for (int j = 0; j + 1 < n; ++j) {
            f.row(idx++) << at(i, j), at(i + 1, j), at(i + 1, j + 1);
            f.row(idx++) << at(i, j), at(i + 1, j + 1), at(i, j + 1);
        }
    }
    return f;
}

void require(bool ok, const char* msg) {
    if (!ok) throw std::invalid_argument(msg);
}

}  // namespace

SyntheticPair make_plate_pair(int n, double side, double h) {
    require(n >= 2, "plate: n must be >= 2");
    require(side > 0 && h > 0, "plate: side and h must be positive");
    TriMesh inner;
    inner.vertices.resize(n * n, 3);
    const double dx = side / (n - 1);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            inner.vertices.row(i * n + j) << i * dx, j * dx, 0.0;
    inner.faces = grid_faces(n);
    TriMesh outer = inner;
    outer.vertices.col(2).array() += h;

    SyntheticPair out;
    out.pair = {std::move(inner), std::move(outer)};
    out.kind = "plate";
    out.thickness = h;
    out.params = {{"n", double(n)}, {"side", side}, {"h", h}};
    validate_pair(out.pair);
    return out;
}

SyntheticPair make_cap_pair(double r_in, double r_out, double cap_angle, int n) {
    require(n >= 2, "cap: n must be >= 2");
    require(r_in > 0 && r_out > r_in, "cap: need 0 < R_in < R_out");
    require(cap_angle > 0 && cap_angle < std::numbers::pi, "cap: angle must be in (0, pi)");
    const double t = std::tan(cap_angle / 2.0);
    TriMesh inner, outer;
    inner.vertices.resize(n * n, 3);
    outer.vertices.resize(n * n, 3);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const double u = -t + 2.0 * t * i / (n - 1);
            const double v = -t + 2.0 * t * j / (n - 1);
            const Vec3 d = Vec3(u, v, 1.0).normalized();
            inner.vertices.row(i * n + j) = r_in * d;
            outer.vertices.row(i * n + j) = r_out * d;
        }
    }
    inner.faces = grid_faces(n);
    outer.faces = inner.faces;

    SyntheticPair out;
    out.pair = {std::move(inner), std::move(outer)};
    out.kind = "cap";
    out.thickness = r_out - r_in;
    out.params = {{"r_in", r_in}, {"r_out", r_out}, {"cap_angle", cap_angle}, {"n", double(n)}};
    validate_pair(out.pair);
    return out;
}

SyntheticPair make_fold_pair(double amplitude, double wavelength, double thickness, int n) {
    require(n >= 2, "fold: n must be >= 2");
    require(amplitude > 0 && wavelength > 0 && thickness > 0,
            "fold: amplitude, wavelength and thickness must be positive");
    // amplitude is the crest-to-trough height of the fold
    const double a = amplitude / 2.0;
    const double k = 2.0 * std::numbers::pi / wavelength;
    const double side = wavelength;
    TriMesh inner;
    inner.vertices.resize(n * n, 3);
    const double dx = side / (n - 1);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            inner.vertices.row(i * n + j) << i * dx, j * dx, a * std::sin(k * i * dx);
    inner.faces = grid_faces(n);
    validate_mesh(inner);

    const Points normals = vertex_normals(inner);
    TriMesh outer = inner;
    outer.vertices += thickness * normals;

    // Offset validity: a face that flips means the offset crossed the
    // center of curvature (amplitude/wavelength too large for thickness).
    const Points n_in = face_normals(inner);
    const Points n_out = face_normals(outer);
    for (Eigen::Index f = 0; f < inner.face_count(); ++f) {
        if (n_in.row(f).dot(n_out.row(f)) <= 0.0)
            throw MeshError("fold: offset surface self-intersects at face " + std::to_string(f) +
                            "; reduce amplitude/wavelength ratio or thickness");
    }

    SyntheticPair out;
    out.pair = {std::move(inner), std::move(outer)};
    out.kind = "fold";
    out.thickness = thickness;
    out.params = {{"amplitude", amplitude},
                  {"wavelength", wavelength},
                  {"thickness", thickness},
                  {"n", double(n)}};
    validate_pair(out.pair);
    return out;
}

}  // namespace ribbon
