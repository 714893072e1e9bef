#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "sada/dataset.hpp"
#include "sada/score_model.hpp"
#include "sada/solver.hpp"
#include "sada/weighting.hpp"

namespace sada {

enum class Method { Naive, Ppi, PpiPlusPlus, Sada, Oracle };

std::string_view method_tag(Method m);
std::optional<Method> method_from_tag(std::string_view tag);

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    double level = 0.0;
};

struct Diagnostics {
    bool centering = true;
    double ridge_scale = kDefaultRidgeScale;
    double ridge_used = 0.0;
    // Weights carry the (N - n) / N factor.
    bool unlabeled_fraction_applied = false;
    int solver_iterations = 0;
    int weighting_passes = 0;
    bool fallback_to_naive = false;
    int floored_diagonals = 0;
    // PPI++ tuning weight.
    std::optional<double> scalar_weight;
    std::vector<std::string> notes;
};

struct EstimateReport {
    VectorXd theta_hat;
    Method method = Method::Naive;
    // 0-based prediction column for single-column methods.
    std::optional<Index> prediction_index;
    std::optional<WeightMatrix> weights;
    std::optional<MatrixXd> covariance;
    // Sample size that scales the covariance: n, or N for the oracle.
    Index scale_size = 0;
    std::vector<Interval> intervals;
    Diagnostics diagnostics;

    // e.g. "sada", "ppi_2".
    std::string label() const;
};

struct EstimatorOptions {
    SolverConfig solver;
    bool centering = true;
    double ridge_scale = kDefaultRidgeScale;
    // Extra pilot -> weights -> estimate rounds after the first (0 = one pass).
    int extra_passes = 0;
};

// Root of
//   (1/n) sum_{i<=n} s(x_i, y_i; theta)
//     + W' [ (1/(N-n)) sum_{i>n} S(x_i, yhat_i; theta) - (1/n) sum_{i<=n} S(x_i, yhat_i; theta) ].
SolveResult weighted_estimate(const Dataset& ds, const ScoreModel& model, const MatrixXd& weights,
                              const SolverConfig& cfg, const VectorXd& theta0);

EstimateReport naive_estimate(const Dataset& ds, const ScoreModel& model,
                              const SolverConfig& cfg = {});

// k is a 0-based prediction column.
EstimateReport ppi_estimate(const Dataset& ds, const ScoreModel& model, Index k,
                            const SolverConfig& cfg = {});

// W = w I with w = (N-n)/N tr(H^-1 C H^-1) / tr(H^-1 V H^-1), the minimizer of
// the trace of the estimated asymptotic covariance.
EstimateReport ppi_pp_estimate(const Dataset& ds, const ScoreModel& model, Index k,
                               const EstimatorOptions& opts = {});

// Naive pilot, plug-in weights scaled by (N - n) / N, then the weighted
// equation. Weight estimation failures fall back to the naive estimate.
EstimateReport sada_estimate(const Dataset& ds, const ScoreModel& model,
                             const EstimatorOptions& opts = {});

// Root of (1/N) sum_{i<=N} s(x_i, truth_i; theta).
EstimateReport oracle_estimate(const Dataset& ds, const VectorXd& truth, const ScoreModel& model,
                               const SolverConfig& cfg = {});

}  // namespace sada
