#include "ribbon/kernel.hpp"

#include <cmath>

namespace ribbon {

double k_eval(const KernelSpec& spec, const Vec3& x, const Vec3& y) {
    const double s2 = spec.sigma * spec.sigma;
    return std::exp(-(x - y).squaredNorm() / (2.0 * s2));
}

Vec3 field_eval(const KernelSpec& spec, const ControlField& cf, const Vec3& x) {
    Vec3 v = Vec3::Zero();
    for (Eigen::Index i = 0; i < cf.centers.rows(); ++i)
        v += k_eval(spec, x, cf.centers.row(i)) * Vec3(cf.coeffs.row(i));
    return v;
}

Eigen::Matrix3d field_jacobian(const KernelSpec& spec, const ControlField& cf, const Vec3& x) {
    const double s2 = spec.sigma * spec.sigma;
    Eigen::Matrix3d jac = Eigen::Matrix3d::Zero();
    for (Eigen::Index i = 0; i < cf.centers.rows(); ++i) {
        const Vec3 r = x - Vec3(cf.centers.row(i));
        const Vec3 gk = -(k_eval(spec, x, cf.centers.row(i)) / s2) * r;
        jac += Vec3(cf.coeffs.row(i)) * gk.transpose();
    }
    return jac;
}

Eigen::MatrixXd kernel_matrix(const KernelSpec& spec, const Points& a, const Points& b) {
    const double inv = -1.0 / (2.0 * spec.sigma * spec.sigma);
    const Eigen::Index m = a.rows(), n = b.rows();
    const double *ax = a.col(0).data(), *ay = a.col(1).data(), *az = a.col(2).data();
    const double *bx = b.col(0).data(), *by = b.col(1).data(), *bz = b.col(2).data();
    Eigen::MatrixXd k(m, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        double* col = k.col(j).data();
        for (Eigen::Index i = 0; i < m; ++i) {
            const double dx = ax[i] - bx[j], dy = ay[i] - by[j], dz = az[i] - bz[j];
            col[i] = std::exp(inv * (dx * dx + dy * dy + dz * dz));
        }
    }
    return k;
}

double gram_apply(const KernelSpec& spec, const Points& centers, const Points& coeffs) {
    double total = 0.0;
    for (Eigen::Index i = 0; i < centers.rows(); ++i) {
        total += coeffs.row(i).squaredNorm();  // k(c_i, c_i) = 1
        for (Eigen::Index j = i + 1; j < centers.rows(); ++j)
            total += 2.0 * k_eval(spec, centers.row(i), centers.row(j)) *
                     coeffs.row(i).dot(coeffs.row(j));
    }
    return total;
}

Points field_eval_points(const KernelSpec& spec, const ControlField& cf, const Points& queries) {
    return kernel_matrix(spec, queries, cf.centers) * cf.coeffs;
}

Eigen::MatrixXd gram_matrix(const KernelSpec& spec, const Points& points) {
    const Eigen::Index n = points.rows();
    Eigen::MatrixXd k(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        k(i, i) = 1.0;
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double kij = k_eval(spec, points.row(i), points.row(j));
            k(i, j) = kij;
            k(j, i) = kij;
        }
    }
    return k;
}

FieldPullback field_eval_pullback_shared(const KernelSpec& spec, const Points& points,
                                         const Points& coeffs, const Points& cotangent) {
    const Eigen::Index n = points.rows();
    const double s2 = spec.sigma * spec.sigma;
    FieldPullback out;
    out.d_coeffs = Points::Zero(n, 3);
    out.d_points = Points::Zero(n, 3);
    for (Eigen::Index i = 0; i < n; ++i) {
        out.d_coeffs.row(i) += cotangent.row(i);  // diagonal, k = 1
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const Vec3 r = points.row(i) - points.row(j);
            const double kij = std::exp(-r.squaredNorm() / (2.0 * s2));
            out.d_coeffs.row(i) += kij * cotangent.row(j);
            out.d_coeffs.row(j) += kij * cotangent.row(i);
            const double c = cotangent.row(i).dot(coeffs.row(j)) +
                             cotangent.row(j).dot(coeffs.row(i));
            const Vec3 g = (c * kij / s2) * r;
            out.d_points.row(i) -= g;
            out.d_points.row(j) += g;
        }
    }
    return out;
}

}  // namespace ribbon
