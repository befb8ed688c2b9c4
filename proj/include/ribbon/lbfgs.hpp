#pragma once

#include <functional>
#include <string>

#include <Eigen/Core>

namespace ribbon {

// Evaluates the objective and writes the gradient.
using ObjectiveFn = std::function<double(const Eigen::VectorXd& x, Eigen::VectorXd& grad)>;

// Applies an SPD seed matrix H0 to a vector (quasi-Newton preconditioner).
using PrecondFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

struct LbfgsParams {
    int memory = 10;
    int max_iterations = 200;
    // converged when |g| <= tolerance * max(1, |g0|)
    double gradient_tolerance = 1e-6;
    int max_line_search = 40;
    double c1 = 1e-4;  // sufficient decrease
    double c2 = 0.9;   // curvature
    PrecondFn precondition;  // optional; identity when unset
};

struct LbfgsResult {
    double value = 0.0;
    double gradient_norm = 0.0;
    int iterations = 0;
    int evaluations = 0;
    bool converged = false;
    std::string status;
};

// Minimizes fg over x in place. Accepted steps satisfy the strong Wolfe
// conditions; on a curvature failure the direction is reset to steepest
// descent with a backtracking (Armijo) search.
LbfgsResult lbfgs_minimize(const ObjectiveFn& fg, Eigen::VectorXd& x, const LbfgsParams& params);

}  // namespace ribbon
