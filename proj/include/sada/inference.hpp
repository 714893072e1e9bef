#pragma once

#include <vector>

#include <Eigen/Dense>

#include "sada/dataset.hpp"
#include "sada/estimators.hpp"
#include "sada/score_model.hpp"

namespace sada {

// Pieces of the sandwich covariance Omega = H^-1 Sigma_opt H^-1 with
// Sigma_opt = Sigma_nv - (N - n)/N Sigma_g.
struct SandwichParts {
    MatrixXd H_hat;
    MatrixXd sigma_nv;
    MatrixXd sigma_g;
    MatrixXd sigma_opt;
    MatrixXd omega;
    double unlabeled_fraction = 0.0;
    double ridge_used = 0.0;
};

// (1/n) sum_{i<=n} ds/dtheta' at theta.
MatrixXd estimate_hessian(const Dataset& ds, const ScoreModel& model, const VectorXd& theta);

// (1/n) sum_{i<=n} s s', uncentered.
MatrixXd estimate_sigma_nv(const Dataset& ds, const ScoreModel& model, const VectorXd& theta);

// cross' * gram^{-1} * cross using the plug-in moments of the weighting module
// (regularized gram inverse). Throws SingularGram.
MatrixXd estimate_sigma_g(const Dataset& ds, const ScoreModel& model, const VectorXd& theta,
                          bool centering, double ridge_scale = kDefaultRidgeScale);

// Efficiency-gain term of an arbitrary fixed weight W, defined so that
// Sigma_nv - (N-n)/N * gain(W) is the n-scaled asymptotic score variance of
// the weighted estimator:
//   gain(W) = N/(N-n) (W'C + C'W) - (N/(N-n))^2 W' G W.
// At the optimal W = (N-n)/N G^-1 C it equals the Sigma_g above.
MatrixXd estimate_weight_gain(const Dataset& ds, const ScoreModel& model, const VectorXd& theta,
                              const MatrixXd& weights, bool centering);

// Parts for the optimal-weight (SADA) sandwich at theta. omega here is
// unfloored; covariance_and_intervals applies the diagonal floor.
SandwichParts sandwich_parts(const Dataset& ds, const ScoreModel& model, const VectorXd& theta,
                             bool centering, double ridge_scale = kDefaultRidgeScale);

// Parts for a fixed weight matrix (naive: W = 0, PPI, PPI++).
SandwichParts sandwich_parts_for_weights(const Dataset& ds, const ScoreModel& model,
                                         const VectorXd& theta, const MatrixXd& weights,
                                         bool centering);

// Standard normal quantile and chi-square quantile.
double normal_quantile(double prob);
double chi_square_quantile(double prob, int dof);

struct CovarianceResult {
    MatrixXd omega;
    std::vector<Interval> intervals;
    int floored_diagonals = 0;
};

// Floors negative diagonal entries of sigma_opt at zero, forms
// Omega = H^-1 Sigma_opt H^-1 and intervals theta_j -+ sqrt(Omega_jj) z / sqrt(n).
// Throws SingularHessian.
CovarianceResult covariance_and_intervals(const SandwichParts& parts, const VectorXd& theta_hat,
                                          Index n, double level);

// n (theta_hat - theta)' Omega^+ (theta_hat - theta) <= chi2_{p, level}.
bool in_confidence_region(const VectorXd& theta_hat, const MatrixXd& omega, Index n,
                          const VectorXd& theta, double level);

// Fills covariance and intervals on an estimator report, choosing the
// variance formula that matches the report's method.
void attach_inference(EstimateReport& report, const Dataset& ds, const ScoreModel& model,
                      double level, const VectorXd* truth = nullptr);

}  // namespace sada
