#include "ribbon/lbfgs.hpp"

#include <cmath>
#include <deque>
#include <limits>

namespace ribbon {

namespace {

struct LineSearchState {
    const ObjectiveFn& fg;
    const Eigen::VectorXd& x0;
    const Eigen::VectorXd& dir;
    Eigen::VectorXd x;
    Eigen::VectorXd grad;
    double value = 0.0;
    int evaluations = 0;

    double phi(double a, double& dphi) {
        x = x0 + a * dir;
        value = fg(x, grad);
        ++evaluations;
        dphi = grad.dot(dir);
        return value;
    }
};

// Strong Wolfe line search (bracket + zoom with bisection safeguard).
// Returns the accepted step, or 0 on failure.
double wolfe_search(LineSearchState& ls, double phi0, double dphi0, double c1, double c2,
                    int max_evals) {
    double a_prev = 0.0, phi_prev = phi0, dphi_prev = dphi0;
    double a = 1.0;
    double lo = 0.0, hi = 0.0, phi_lo = 0.0;
    bool bracketed = false;
    int it = 0;
    for (; it < max_evals; ++it) {
        double dphi;
        const double f = ls.phi(a, dphi);
        if (f > phi0 + c1 * a * dphi0 || (it > 0 && f >= phi_prev)) {
            lo = a_prev;
            hi = a;
            phi_lo = phi_prev;
            bracketed = true;
            break;
        }
        if (std::abs(dphi) <= -c2 * dphi0) return a;
        if (dphi >= 0.0) {
            lo = a;
            hi = a_prev;
            phi_lo = f;
            bracketed = true;
            break;
        }
        a_prev = a;
        phi_prev = f;
        dphi_prev = dphi;
        a *= 2.0;
    }
    (void)dphi_prev;
    if (!bracketed) return 0.0;

    for (; it < max_evals; ++it) {
        const double a_mid = 0.5 * (lo + hi);
        double dphi;
        const double f = ls.phi(a_mid, dphi);
        if (f > phi0 + c1 * a_mid * dphi0 || f >= phi_lo) {
            hi = a_mid;
        } else {
            if (std::abs(dphi) <= -c2 * dphi0) return a_mid;
            if (dphi * (hi - lo) >= 0.0) hi = lo;
            lo = a_mid;
            phi_lo = f;
        }
        if (std::abs(hi - lo) < 1e-16 * std::max(1.0, std::abs(lo))) break;
    }
    return 0.0;
}

// Armijo backtracking, used as the gradient-descent fallback.
double backtracking_search(LineSearchState& ls, double phi0, double dphi0, double c1,
                           int max_evals) {
    double a = 1.0;
    for (int it = 0; it < max_evals; ++it) {
        double dphi;
        const double f = ls.phi(a, dphi);
        if (f <= phi0 + c1 * a * dphi0) return a;
        a *= 0.5;
    }
    return 0.0;
}

}  // namespace

LbfgsResult lbfgs_minimize(const ObjectiveFn& fg, Eigen::VectorXd& x, const LbfgsParams& params) {
    LbfgsResult result;
    const Eigen::Index n = x.size();
    Eigen::VectorXd grad(n);
    double f = fg(x, grad);
    result.evaluations = 1;

    const double g0_norm = grad.norm();
    const double gtol = params.gradient_tolerance * std::max(1.0, g0_norm);

    std::deque<Eigen::VectorXd> s_hist, y_hist;
    std::deque<double> rho_hist;

    for (int iter = 0; iter < params.max_iterations; ++iter) {
        result.iterations = iter;
        if (grad.norm() <= gtol) {
            result.converged = true;
            result.status = "gradient tolerance reached";
            break;
        }

        // two-loop recursion with an optional SPD seed H0
        Eigen::VectorXd dir = -grad;
        std::vector<double> alpha(s_hist.size());
        for (int i = static_cast<int>(s_hist.size()) - 1; i >= 0; --i) {
            alpha[i] = rho_hist[i] * s_hist[i].dot(dir);
            dir -= alpha[i] * y_hist[i];
        }
        if (params.precondition) {
            Eigen::VectorXd h0_dir = params.precondition(dir);
            if (!s_hist.empty()) {
                const double gamma = s_hist.back().dot(y_hist.back()) /
                                     y_hist.back().dot(params.precondition(y_hist.back()));
                h0_dir *= gamma;
            }
            dir = std::move(h0_dir);
        } else if (!s_hist.empty()) {
            const double gamma =
                s_hist.back().dot(y_hist.back()) / y_hist.back().squaredNorm();
            dir *= gamma;
        }
        for (size_t i = 0; i < s_hist.size(); ++i) {
            const double beta = rho_hist[i] * y_hist[i].dot(dir);
            dir += (alpha[i] - beta) * s_hist[i];
        }

        double dphi0 = grad.dot(dir);
        if (!(dphi0 < 0.0)) {  // not a descent direction, reset
            dir = params.precondition ? -params.precondition(grad) : -grad;
            dphi0 = grad.dot(dir);
            s_hist.clear();
            y_hist.clear();
            rho_hist.clear();
        }

        LineSearchState ls{fg, x, dir, Eigen::VectorXd(n), Eigen::VectorXd(n)};
        double step = wolfe_search(ls, f, dphi0, params.c1, params.c2, params.max_line_search);
        if (step <= 0.0) {
            // (preconditioned) gradient-descent fallback
            dir = params.precondition ? -params.precondition(grad) : -grad;
            dphi0 = grad.dot(dir);
            s_hist.clear();
            y_hist.clear();
            rho_hist.clear();
            LineSearchState ls2{fg, x, dir, Eigen::VectorXd(n), Eigen::VectorXd(n)};
            step = backtracking_search(ls2, f, dphi0, params.c1, params.max_line_search);
            result.evaluations += ls2.evaluations;
            if (step <= 0.0) {
                result.evaluations += ls.evaluations;
                result.status = "line search failed";
                break;
            }
            ls.x = ls2.x;
            ls.grad = ls2.grad;
            ls.value = ls2.value;
        }
        result.evaluations += ls.evaluations;

        Eigen::VectorXd s = ls.x - x;
        Eigen::VectorXd y = ls.grad - grad;
        x = ls.x;
        grad = ls.grad;
        f = ls.value;

        const double sy = s.dot(y);
        if (sy > 1e-12 * s.norm() * y.norm()) {
            s_hist.push_back(std::move(s));
            y_hist.push_back(std::move(y));
            rho_hist.push_back(1.0 / sy);
            if (static_cast<int>(s_hist.size()) > params.memory) {
                s_hist.pop_front();
                y_hist.pop_front();
                rho_hist.pop_front();
            }
        }
        result.iterations = iter + 1;
    }

    if (!result.converged && result.status.empty()) result.status = "iteration limit reached";
    result.value = f;
    result.gradient_norm = grad.norm();
    return result;
}

}  // namespace ribbon
