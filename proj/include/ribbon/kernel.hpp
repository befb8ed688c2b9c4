#pragma once

#include <Eigen/Core>

#include "ribbon/mesh.hpp"

namespace ribbon {

// Isotropic Gaussian scalar kernel k(x,y) = exp(-|x-y|^2 / (2 sigma^2)),
// acting on vector fields as k * Identity.
struct KernelSpec {
    double sigma = 1.0;  // mm, > 0
};

// Discrete vector field v(x) = sum_i k(x, c_i) alpha_i.
struct ControlField {
    Points centers;
    Points coeffs;
};

double k_eval(const KernelSpec& spec, const Vec3& x, const Vec3& y);

Vec3 field_eval(const KernelSpec& spec, const ControlField& cf, const Vec3& x);

// (Dv)_ab = d v_a / d x_b
Eigen::Matrix3d field_jacobian(const KernelSpec& spec, const ControlField& cf, const Vec3& x);

// sum_ij k(c_i, c_j) alpha_i . alpha_j  (the squared V norm of the field)
double gram_apply(const KernelSpec& spec, const Points& centers, const Points& coeffs);

// Batched evaluation at many query points.
Points field_eval_points(const KernelSpec& spec, const ControlField& cf, const Points& queries);

// Dense Gram matrix K_ij = k(p_i, p_j).
Eigen::MatrixXd gram_matrix(const KernelSpec& spec, const Points& points);

// Dense rectangular kernel matrix K_ij = k(a_i, b_j).
Eigen::MatrixXd kernel_matrix(const KernelSpec& spec, const Points& a, const Points& b);

// Pullback of sum_i w_i . v(q_i) through the field evaluation, for queries
// and centers that are the same point set (the flow discretization): the
// returned d_points combines the query and center dependence.
struct FieldPullback {
    Points d_coeffs;
    Points d_points;
};
FieldPullback field_eval_pullback_shared(const KernelSpec& spec, const Points& points,
                                         const Points& coeffs, const Points& cotangent);

}  // namespace ribbon
