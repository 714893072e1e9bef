#pragma once

#include <functional>

#include <Eigen/Dense>

namespace sada {

struct SolverConfig {
    int max_iters = 50;
    double abs_tol = 1e-10;
    int max_halvings = 20;
};

// Throws ConfigError unless max_iters >= 1, abs_tol > 0, max_halvings >= 0.
void validate_solver_config(const SolverConfig& cfg);

struct SolveResult {
    Eigen::VectorXd theta;
    int iterations = 0;
    double residual_norm = 0.0;
};

using ResidualFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;
using JacobianFn = std::function<Eigen::MatrixXd(const Eigen::VectorXd&)>;

// Jacobians with reciprocal condition number below this are singular.
inline constexpr double kSingularRcond = 1e-12;

// Reciprocal 1-norm condition estimate; 0 for zero or non-finite matrices.
double reciprocal_condition(const Eigen::MatrixXd& m);

// Damped Newton iteration for residual(theta) = 0. A step is halved (at most
// cfg.max_halvings times) until the residual norm decreases. Throws
// SingularJacobian or NonConvergence.
SolveResult solve_estimating_equation(const ResidualFn& residual, const JacobianFn& jac,
                                      Eigen::VectorXd theta0, const SolverConfig& cfg = {});

}  // namespace sada
