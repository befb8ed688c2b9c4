#include "ribbon/energy.hpp"

#include <cmath>
#include <vector>

namespace ribbon {

double hybrid_norm(const HybridSpec& spec, const TriMesh& surface, const ControlField& cf) {
    double total = gram_apply(spec.v_kernel, cf.centers, cf.coeffs);
    if (spec.lambda <= 0.0) return total;

    const double s2 = spec.v_kernel.sigma * spec.v_kernel.sigma;
    const double inv = -1.0 / (2.0 * s2);
    const Eigen::Index n = cf.centers.rows();
    const Points centers = face_barycenters(surface);
    const Eigen::VectorXd areas = face_areas(surface);
    const double *bx = centers.col(0).data(), *by = centers.col(1).data(),
                 *bz = centers.col(2).data();
    const double *px = cf.centers.col(0).data(), *py = cf.centers.col(1).data(),
                 *pz = cf.centers.col(2).data();
    const double *qx = cf.coeffs.col(0).data(), *qy = cf.coeffs.col(1).data(),
                 *qz = cf.coeffs.col(2).data();
    for (Eigen::Index f = 0; f < surface.face_count(); ++f) {
        double d00 = 0, d01 = 0, d02 = 0, d10 = 0, d11 = 0, d12 = 0, d20 = 0, d21 = 0, d22 = 0;
        for (Eigen::Index j = 0; j < n; ++j) {
            const double rx = bx[f] - px[j], ry = by[f] - py[j], rz = bz[f] - pz[j];
            const double a = -std::exp(inv * (rx * rx + ry * ry + rz * rz)) / s2;
            const double g0 = a * rx, g1 = a * ry, g2 = a * rz;
            d00 += qx[j] * g0; d01 += qx[j] * g1; d02 += qx[j] * g2;
            d10 += qy[j] * g0; d11 += qy[j] * g1; d12 += qy[j] * g2;
            d20 += qz[j] * g0; d21 += qz[j] * g1; d22 += qz[j] * g2;
        }
        const double fro2 = d00 * d00 + d01 * d01 + d02 * d02 + d10 * d10 + d11 * d11 +
                            d12 * d12 + d20 * d20 + d21 * d21 + d22 * d22;
        total += spec.lambda * fro2 * areas[f];
    }
    return total;
}

Points constraint_eval(const TriMesh& surface, const KernelSpec& v_kernel,
                       const ControlField& cf) {
    const Points v = field_eval_points(v_kernel, cf, surface.vertices);
    const Points n = vertex_normals(surface);
    Points c(surface.vertex_count(), 3);
    for (Eigen::Index i = 0; i < surface.vertex_count(); ++i)
        c.row(i) = v.row(i) - v.row(i).dot(n.row(i)) * n.row(i);
    return c;
}

EnergyGrads hybrid_norm_gradients(const HybridSpec& spec, const TriMesh& surface,
                                  const ControlField& cf) {
    const Eigen::Index n = cf.centers.rows();
    const double s2 = spec.v_kernel.sigma * spec.v_kernel.sigma;
    EnergyGrads out;
    out.d_coeffs = Points::Zero(n, 3);
    out.d_vertices = Points::Zero(surface.vertex_count(), 3);

    // Gram term
    for (Eigen::Index i = 0; i < n; ++i) {
        out.value += cf.coeffs.row(i).squaredNorm();
        out.d_coeffs.row(i) += 2.0 * cf.coeffs.row(i);
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const Vec3 r = cf.centers.row(i) - cf.centers.row(j);
            const double kij = std::exp(-r.squaredNorm() / (2.0 * s2));
            const double dot = cf.coeffs.row(i).dot(cf.coeffs.row(j));
            out.value += 2.0 * kij * dot;
            out.d_coeffs.row(i) += 2.0 * kij * cf.coeffs.row(j);
            out.d_coeffs.row(j) += 2.0 * kij * cf.coeffs.row(i);
            const Vec3 g = (2.0 * dot * kij / s2) * r;
            out.d_vertices.row(i) -= g;
            out.d_vertices.row(j) += g;
        }
    }

    if (spec.lambda <= 0.0) return out;

    // Frobenius term, quadratured at face barycenters
    const double inv = -1.0 / (2.0 * s2);
    const Points bary = face_barycenters(surface);
    const double *bx = bary.col(0).data(), *by = bary.col(1).data(), *bz = bary.col(2).data();
    const double *px = cf.centers.col(0).data(), *py = cf.centers.col(1).data(),
                 *pz = cf.centers.col(2).data();
    const double *qx = cf.coeffs.col(0).data(), *qy = cf.coeffs.col(1).data(),
                 *qz = cf.coeffs.col(2).data();
    double *ocx = out.d_coeffs.col(0).data(), *ocy = out.d_coeffs.col(1).data(),
           *ocz = out.d_coeffs.col(2).data();
    double *ovx = out.d_vertices.col(0).data(), *ovy = out.d_vertices.col(1).data(),
           *ovz = out.d_vertices.col(2).data();
    std::vector<double> kbuf(static_cast<size_t>(n));
    Points d_bary = Points::Zero(surface.face_count(), 3);
    Points d_wnormals = Points::Zero(surface.face_count(), 3);
    for (Eigen::Index f = 0; f < surface.face_count(); ++f) {
        const Vec3 wn = weighted_face_normal(surface.vertices.row(surface.faces(f, 0)),
                                             surface.vertices.row(surface.faces(f, 1)),
                                             surface.vertices.row(surface.faces(f, 2)));
        const double area = wn.norm();
        if (area <= kAreaEpsilon)
            throw MeshError("hybrid norm: degenerate face " + std::to_string(f));

        // first pass: the Jacobian Dv at the barycenter and the kernel row
        double d00 = 0, d01 = 0, d02 = 0, d10 = 0, d11 = 0, d12 = 0, d20 = 0, d21 = 0, d22 = 0;
        for (Eigen::Index j = 0; j < n; ++j) {
            const double rx = bx[f] - px[j], ry = by[f] - py[j], rz = bz[f] - pz[j];
            const double kv = std::exp(inv * (rx * rx + ry * ry + rz * rz));
            kbuf[static_cast<size_t>(j)] = kv;
            const double a = -kv / s2;
            const double g0 = a * rx, g1 = a * ry, g2 = a * rz;
            d00 += qx[j] * g0; d01 += qx[j] * g1; d02 += qx[j] * g2;
            d10 += qy[j] * g0; d11 += qy[j] * g1; d12 += qy[j] * g2;
            d20 += qz[j] * g0; d21 += qz[j] * g1; d22 += qz[j] * g2;
        }
        const double fro2 = d00 * d00 + d01 * d01 + d02 * d02 + d10 * d10 + d11 * d11 +
                            d12 * d12 + d20 * d20 + d21 * d21 + d22 * d22;
        out.value += spec.lambda * fro2 * area;
        d_wnormals.row(f) = (spec.lambda * fro2 / area) * wn;  // d/d area via |wn|

        // second pass: pull the Frobenius cotangent back onto coefficients,
        // centers (d g / d center = (k/s2) I - (k/s2^2) r r^T), and the
        // barycenter (the negative of the center dependence through r)
        const double w = 2.0 * spec.lambda * area;
        double dx0 = 0, dx1 = 0, dx2 = 0;
        for (Eigen::Index j = 0; j < n; ++j) {
            const double rx = bx[f] - px[j], ry = by[f] - py[j], rz = bz[f] - pz[j];
            const double kv = kbuf[static_cast<size_t>(j)];
            const double a = -kv / s2;
            const double g0 = a * rx, g1 = a * ry, g2 = a * rz;
            ocx[j] += w * (d00 * g0 + d01 * g1 + d02 * g2);
            ocy[j] += w * (d10 * g0 + d11 * g1 + d12 * g2);
            ocz[j] += w * (d20 * g0 + d21 * g1 + d22 * g2);
            const double u0 = d00 * qx[j] + d10 * qy[j] + d20 * qz[j];
            const double u1 = d01 * qx[j] + d11 * qy[j] + d21 * qz[j];
            const double u2 = d02 * qx[j] + d12 * qy[j] + d22 * qz[j];
            const double ru = rx * u0 + ry * u1 + rz * u2;
            const double c1 = w * kv / s2, c2 = w * kv * ru / (s2 * s2);
            const double h0 = c1 * u0 - c2 * rx;
            const double h1 = c1 * u1 - c2 * ry;
            const double h2 = c1 * u2 - c2 * rz;
            ovx[j] += h0; ovy[j] += h1; ovz[j] += h2;
            dx0 -= h0; dx1 -= h1; dx2 -= h2;
        }
        d_bary.row(f) = Vec3(dx0, dx1, dx2);
    }

    // scatter barycenter and area cotangents to vertices
    for (Eigen::Index f = 0; f < surface.face_count(); ++f) {
        const int ia = surface.faces(f, 0), ib = surface.faces(f, 1), ic = surface.faces(f, 2);
        const Vec3 dc = d_bary.row(f) / 3.0;
        out.d_vertices.row(ia) += dc;
        out.d_vertices.row(ib) += dc;
        out.d_vertices.row(ic) += dc;
        const Vec3 e1 = surface.vertices.row(ib) - surface.vertices.row(ia);
        const Vec3 e2 = surface.vertices.row(ic) - surface.vertices.row(ia);
        const Vec3 wv = d_wnormals.row(f);
        const Vec3 gb = 0.5 * e2.cross(wv);
        const Vec3 gc = 0.5 * wv.cross(e1);
        out.d_vertices.row(ib) += gb;
        out.d_vertices.row(ic) += gc;
        out.d_vertices.row(ia) -= gb + gc;
    }
    return out;
}

ConstraintAlGrads constraint_al_gradients(const TriMesh& surface, const KernelSpec& v_kernel,
                                          const ControlField& cf, const Points& multipliers,
                                          double rho) {
    const Eigen::Index nv = surface.vertex_count();
    const Points v = field_eval_points(v_kernel, cf, surface.vertices);
    const Points n = vertex_normals(surface);

    ConstraintAlGrads out;
    out.residuals.resize(nv, 3);
    Points d_v(nv, 3);       // cotangent on the field values
    Points d_n(nv, 3);       // cotangent on the unit vertex normals
    for (Eigen::Index i = 0; i < nv; ++i) {
        const Vec3 ni = n.row(i);
        const Vec3 vi = v.row(i);
        const Vec3 ci = vi - vi.dot(ni) * ni;
        out.residuals.row(i) = ci;
        const Vec3 mu = multipliers.row(i);
        out.value += -mu.dot(ci) + 0.5 * rho * ci.squaredNorm();
        const Vec3 w = -mu + rho * ci;
        d_v.row(i) = w - w.dot(ni) * ni;
        d_n.row(i) = -(w.dot(ni) * vi + vi.dot(ni) * w);
    }

    const FieldPullback fp = field_eval_pullback_shared(v_kernel, cf.centers, cf.coeffs, d_v);
    out.d_coeffs = fp.d_coeffs;
    out.d_vertices = fp.d_points + vertex_normals_pullback(surface, d_n);
    return out;
}

}  // namespace ribbon
