#pragma once

#include "ribbon/kernel.hpp"
#include "ribbon/mesh.hpp"

namespace ribbon {

// |v|_q^2 = |v|_V^2 + lambda * integral over S_q of |Dv|_F^2, with the
// surface integral quadratured at face barycenters with area weights.
struct HybridSpec {
    KernelSpec v_kernel;
    double lambda = 1.0;  // >= 0
};

double hybrid_norm(const HybridSpec& spec, const TriMesh& surface, const ControlField& cf);

// Tangential component of v at each vertex: C_i = v_i - (v_i . n_i) n_i.
Points constraint_eval(const TriMesh& surface, const KernelSpec& v_kernel,
                       const ControlField& cf);

// Gradients below assume cf.centers are the surface's current vertices, so
// d_vertices combines the geometric and center dependence.
struct EnergyGrads {
    double value = 0.0;
    Points d_coeffs;
    Points d_vertices;
};

EnergyGrads hybrid_norm_gradients(const HybridSpec& spec, const TriMesh& surface,
                                  const ControlField& cf);

// sum_i [ -mu_i . C_i + (rho/2) |C_i|^2 ] and its gradients.
struct ConstraintAlGrads : EnergyGrads {
    Points residuals;
};

ConstraintAlGrads constraint_al_gradients(const TriMesh& surface, const KernelSpec& v_kernel,
                                          const ControlField& cf, const Points& multipliers,
                                          double rho);

}  // namespace ribbon
