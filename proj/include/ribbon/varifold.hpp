#pragma once

#include "ribbon/kernel.hpp"
#include "ribbon/mesh.hpp"

namespace ribbon {

// Spatial Gaussian kernel chi of width sigma_w; the normal-alignment factor
// (1 + (n . n')^2) is fixed.
struct VarifoldSpec {
    KernelSpec spatial;
};

// 2 x median edge length of the target surface
double default_varifold_sigma(const TriMesh& outer);

// sum_{f in A} sum_{g in B} chi(c_f, c_g) (1 + (n_f . n_g)^2) a_f a_g
// with one Dirac per face at the barycenter.
double varifold_inner(const VarifoldSpec& spec, const TriMesh& a, const TriMesh& b);

// Squared kernel-dual norm <A,A> - 2<A,B> + <B,B>; zero at exact alignment.
double varifold_distance(const VarifoldSpec& spec, const TriMesh& a, const TriMesh& b);

// Gradient of varifold_distance with respect to the vertices of the moving
// mesh `a` (b fixed).
Points varifold_distance_gradient(const VarifoldSpec& spec, const TriMesh& a, const TriMesh& b);

}  // namespace ribbon
