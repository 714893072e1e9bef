#include "sada/solver.hpp"

#include <cmath>
#include <string>

#include "sada/error.hpp"

namespace sada {

using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {
constexpr double kStepFloor = 1e-13;
}

void validate_solver_config(const SolverConfig& cfg) {
    if (cfg.max_iters < 1) {
        throw Error(ErrorCode::ConfigError, "solver max_iters must be >= 1");
    }
    if (!(cfg.abs_tol > 0.0)) {
        throw Error(ErrorCode::ConfigError, "solver abs_tol must be > 0");
    }
    if (cfg.max_halvings < 0) {
        throw Error(ErrorCode::ConfigError, "solver max_halvings must be >= 0");
    }
}

double reciprocal_condition(const MatrixXd& m) {
    if (m.size() == 0 || !m.allFinite() || m.lpNorm<Eigen::Infinity>() == 0.0) {
        return 0.0;
    }
    const double rc = Eigen::PartialPivLU<MatrixXd>(m).rcond();
    return std::isfinite(rc) ? rc : 0.0;
}

SolveResult solve_estimating_equation(const ResidualFn& residual, const JacobianFn& jac,
                                      VectorXd theta0, const SolverConfig& cfg) {
    validate_solver_config(cfg);

    VectorXd theta = std::move(theta0);
    VectorXd r = residual(theta);
    double rnorm = r.norm();

    for (int iter = 0;; ++iter) {
        if (!std::isfinite(rnorm)) {
            throw Error(ErrorCode::NonConvergence, "residual became non-finite");
        }
        if (rnorm <= cfg.abs_tol) {
            return {theta, iter, rnorm};
        }
        if (iter == cfg.max_iters) {
            throw Error(ErrorCode::NonConvergence,
                        "no convergence after " + std::to_string(cfg.max_iters) +
                            " iterations (residual norm " + std::to_string(rnorm) + ")");
        }

        const MatrixXd J = jac(theta);
        const double rc = reciprocal_condition(J);
        if (rc < kSingularRcond) {
            throw Error(ErrorCode::SingularJacobian,
                        "estimating-equation Jacobian is singular (rcond " + std::to_string(rc) +
                            ")");
        }
        const VectorXd step = -Eigen::PartialPivLU<MatrixXd>(J).solve(r);
        // Residual at the rounding floor of a badly scaled problem: the
        // Newton correction is already negligible relative to theta.
        if (step.norm() <= kStepFloor * (1.0 + theta.norm())) {
            theta += step;
            return {theta, iter + 1, residual(theta).norm()};
        }

        double scale = 1.0;
        VectorXd trial = theta + step;
        VectorXd r_trial = residual(trial);
        double trial_norm = r_trial.norm();
        for (int h = 0; h < cfg.max_halvings && !(trial_norm < rnorm); ++h) {
            scale *= 0.5;
            trial = theta + scale * step;
            r_trial = residual(trial);
            trial_norm = r_trial.norm();
        }

        if (!(trial_norm < rnorm)) {
            throw Error(ErrorCode::NonConvergence,
                        "step halving failed to reduce the residual norm " +
                            std::to_string(rnorm));
        }
        theta = std::move(trial);
        r = std::move(r_trial);
        rnorm = trial_norm;
    }
}

}  // namespace sada
