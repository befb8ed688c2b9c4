#include "ribbon/varifold.hpp"

#include <cmath>

namespace ribbon {

namespace {

// Per-face Dirac data: barycenter, area-weighted normal, area.
struct FaceDiracs {
    Points centers;
    Points wnormals;  // norm equals the face area
    Eigen::VectorXd areas;
};

FaceDiracs face_diracs(const TriMesh& m) {
    FaceDiracs d;
    d.centers = face_barycenters(m);
    d.wnormals.resize(m.face_count(), 3);
    d.areas.resize(m.face_count());
    for (Eigen::Index f = 0; f < m.face_count(); ++f) {
        const Vec3 wn = weighted_face_normal(m.vertices.row(m.faces(f, 0)),
                                             m.vertices.row(m.faces(f, 1)),
                                             m.vertices.row(m.faces(f, 2)));
        d.wnormals.row(f) = wn;
        d.areas[f] = wn.norm();
        if (d.areas[f] <= kAreaEpsilon)
            throw MeshError("varifold: degenerate face " + std::to_string(f));
    }
    return d;
}

double inner(const KernelSpec& chi, const FaceDiracs& a, const FaceDiracs& b) {
    const double inv = -1.0 / (2.0 * chi.sigma * chi.sigma);
    const Eigen::Index na = a.centers.rows(), nb = b.centers.rows();
    const double *acx = a.centers.col(0).data(), *acy = a.centers.col(1).data(),
                 *acz = a.centers.col(2).data();
    const double *anx = a.wnormals.col(0).data(), *any = a.wnormals.col(1).data(),
                 *anz = a.wnormals.col(2).data();
    const double *bcx = b.centers.col(0).data(), *bcy = b.centers.col(1).data(),
                 *bcz = b.centers.col(2).data();
    const double *bnx = b.wnormals.col(0).data(), *bny = b.wnormals.col(1).data(),
                 *bnz = b.wnormals.col(2).data();
    double total = 0.0;
    for (Eigen::Index f = 0; f < na; ++f) {
        double row = 0.0;
        const double af = a.areas[f];
        for (Eigen::Index g = 0; g < nb; ++g) {
            const double dx = acx[f] - bcx[g], dy = acy[f] - bcy[g], dz = acz[f] - bcz[g];
            const double k = std::exp(inv * (dx * dx + dy * dy + dz * dz));
            const double s = anx[f] * bnx[g] + any[f] * bny[g] + anz[f] * bnz[g];
            row += k * (af * b.areas[g] + s * s / (af * b.areas[g]));
        }
        total += row;
    }
    return total;
}

// d inner / d (centers, wnormals) of the first argument, second fixed.
void inner_first_arg_grads(const KernelSpec& chi, const FaceDiracs& a, const FaceDiracs& b,
                           Points& d_centers, Points& d_wnormals) {
    const double s2 = chi.sigma * chi.sigma;
    const double inv = -1.0 / (2.0 * s2);
    const Eigen::Index na = a.centers.rows(), nb = b.centers.rows();
    const double *acx = a.centers.col(0).data(), *acy = a.centers.col(1).data(),
                 *acz = a.centers.col(2).data();
    const double *anx = a.wnormals.col(0).data(), *any = a.wnormals.col(1).data(),
                 *anz = a.wnormals.col(2).data();
    const double *bcx = b.centers.col(0).data(), *bcy = b.centers.col(1).data(),
                 *bcz = b.centers.col(2).data();
    const double *bnx = b.wnormals.col(0).data(), *bny = b.wnormals.col(1).data(),
                 *bnz = b.wnormals.col(2).data();
    d_centers.resize(na, 3);
    d_wnormals.resize(na, 3);
    for (Eigen::Index f = 0; f < na; ++f) {
        const double af = a.areas[f];
        const double nfx = anx[f] / af, nfy = any[f] / af, nfz = anz[f] / af;
        double dcx = 0.0, dcy = 0.0, dcz = 0.0, dnx = 0.0, dny = 0.0, dnz = 0.0;
        for (Eigen::Index g = 0; g < nb; ++g) {
            const double rx = acx[f] - bcx[g], ry = acy[f] - bcy[g], rz = acz[f] - bcz[g];
            const double k = std::exp(inv * (rx * rx + ry * ry + rz * rz));
            const double ag = b.areas[g];
            const double s = anx[f] * bnx[g] + any[f] * bny[g] + anz[f] * bnz[g];
            const double p = af * ag + s * s / (af * ag);
            const double cc = -k * p / s2;
            dcx += cc * rx;
            dcy += cc * ry;
            dcz += cc * rz;
            // dP/d wn_f: area via |wn_f|, alignment via the dot product
            const double c1 = k * (ag - s * s / (af * af * ag));
            const double c2 = k * 2.0 * s / (af * ag);
            dnx += c1 * nfx + c2 * bnx[g];
            dny += c1 * nfy + c2 * bny[g];
            dnz += c1 * nfz + c2 * bnz[g];
        }
        d_centers.row(f) = Vec3(dcx, dcy, dcz);
        d_wnormals.row(f) = Vec3(dnx, dny, dnz);
    }
}

// Scatter per-face cotangents on barycenters and weighted normals back to
// vertex positions.
Points scatter_face_grads(const TriMesh& m, const Points& d_centers, const Points& d_wnormals) {
    Points grad = Points::Zero(m.vertex_count(), 3);
    for (Eigen::Index f = 0; f < m.face_count(); ++f) {
        const int ia = m.faces(f, 0), ib = m.faces(f, 1), ic = m.faces(f, 2);
        const Vec3 dc = d_centers.row(f) / 3.0;
        grad.row(ia) += dc;
        grad.row(ib) += dc;
        grad.row(ic) += dc;
        const Vec3 e1 = m.vertices.row(ib) - m.vertices.row(ia);
        const Vec3 e2 = m.vertices.row(ic) - m.vertices.row(ia);
        const Vec3 w = d_wnormals.row(f);
        const Vec3 gb = 0.5 * e2.cross(w);
        const Vec3 gc = 0.5 * w.cross(e1);
        grad.row(ib) += gb;
        grad.row(ic) += gc;
        grad.row(ia) -= gb + gc;
    }
    return grad;
}

}  // namespace

double default_varifold_sigma(const TriMesh& outer) {
    return 2.0 * median_edge_length(outer);
}

double varifold_inner(const VarifoldSpec& spec, const TriMesh& a, const TriMesh& b) {
    return inner(spec.spatial, face_diracs(a), face_diracs(b));
}

double varifold_distance(const VarifoldSpec& spec, const TriMesh& a, const TriMesh& b) {
    const FaceDiracs da = face_diracs(a);
    const FaceDiracs db = face_diracs(b);
    return inner(spec.spatial, da, da) - 2.0 * inner(spec.spatial, da, db) +
           inner(spec.spatial, db, db);
}

Points varifold_distance_gradient(const VarifoldSpec& spec, const TriMesh& a, const TriMesh& b) {
    const FaceDiracs da = face_diracs(a);
    const FaceDiracs db = face_diracs(b);
    Points dc_aa, dn_aa, dc_ab, dn_ab;
    inner_first_arg_grads(spec.spatial, da, da, dc_aa, dn_aa);
    inner_first_arg_grads(spec.spatial, da, db, dc_ab, dn_ab);
    // <A,A> depends on A through both arguments of the symmetric form.
    const Points d_centers = 2.0 * (dc_aa - dc_ab);
    const Points d_wnormals = 2.0 * (dn_aa - dn_ab);
    return scatter_face_grads(a, d_centers, d_wnormals);
}

}  // namespace ribbon
