#pragma once

#include <string>
#include <vector>

#include "ribbon/energy.hpp"
#include "ribbon/mesh.hpp"
#include "ribbon/varifold.hpp"

namespace ribbon {

struct SolverParams {
    int timesteps = 10;              // T >= 2
    double attachment_weight = 1.0;  // w_D
    double sigma_v = 0.0;            // 0 resolves to 0.4 * inner bbox diagonal
    double lambda = 1.0;             // hybrid surface-Frobenius weight
    double sigma_w = 0.0;            // 0 resolves to 2 * outer median edge length
    int inner_max_iterations = 200;
    double inner_gradient_tolerance = 1e-6;
    double al_rho0 = 1.0;
    double al_growth = 10.0;         // penalty multiplier gamma
    double al_shrink = 0.25;         // required violation shrink theta
    double constraint_tolerance = 1e-3;  // on max|C| / mean|v|
    int max_outer_iterations = 50;
};

void validate_params(const SolverParams& params);
// fills sigma_v / sigma_w when left at 0
void resolve_defaults(SolverParams& params, const SurfacePair& pair);

// Discrete flow: states q[0..T] share the inner mesh connectivity; controls
// alpha[0..T-1] are kernel coefficients anchored at the current vertices.
struct Trajectory {
    std::vector<Points> states;
    std::vector<Points> controls;
    Faces faces;
    double dt = 0.0;

    int steps() const { return static_cast<int>(controls.size()); }
    TriMesh mesh_at(int t) const { return TriMesh{states[t], faces}; }
};

struct ALState {
    std::vector<Points> multipliers;  // one N x 3 block per timestep
    double rho = 1.0;
    std::vector<double> violation_history;
};

ALState make_al_state(Eigen::Index vertex_count, int timesteps, double rho0);

struct SolverError : std::runtime_error {
    explicit SolverError(const std::string& what) : std::runtime_error(what) {}
};

// Explicit Euler: q[t+1] = q[t] + dt * v_t(q[t]). Throws SolverError on a
// non-finite state.
Trajectory forward_integrate(const TriMesh& q0, const std::vector<Points>& controls,
                             const SolverParams& params);

// F = sum_t dt * |v_t|^2_{q_t} + w_D * D(q_T, target)
double objective(const Trajectory& traj, const TriMesh& target, const SolverParams& params);

// L = F + sum_t sum_i [ -mu . C + (rho/2)|C|^2 ]
double augmented_objective(const Trajectory& traj, const TriMesh& target,
                           const SolverParams& params, const ALState& al);

// Value of L and its exact gradient with respect to every control
// coefficient, by a reverse sweep through the Euler recursion.
double augmented_objective_with_gradient(const TriMesh& q0, const std::vector<Points>& controls,
                                         const TriMesh& target, const SolverParams& params,
                                         const ALState& al, std::vector<Points>& grad);

struct OuterRecord {
    int outer = 0;
    double objective = 0.0;
    double attachment = 0.0;
    double max_violation = 0.0;
    double mean_speed = 0.0;
    double rho = 0.0;
    int inner_iterations = 0;
    int inner_evaluations = 0;
};

struct SolveReport {
    std::vector<OuterRecord> records;
    bool converged = false;
    bool fold_over_free = true;
    std::string status;
};

struct SolveResult {
    Trajectory trajectory;
    ALState al;
    SolveReport report;
};

SolveResult solve(const SurfacePair& pair, SolverParams params);

// true when every face normal keeps a positive dot with its t=0 direction
bool trajectory_fold_over_free(const Trajectory& traj);

struct GradientCheckReport {
    double max_rel_error = 0.0;
    int entries = 0;
};

// Adjoint vs central finite differences on a small random instance.
GradientCheckReport gradient_check(unsigned seed);

}  // namespace ribbon
