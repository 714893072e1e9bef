#pragma once

#include <Eigen/Dense>

#include "sada/dataset.hpp"
#include "sada/score_model.hpp"

namespace sada {

// (K p) x p tuning matrix, blocks stacked vertically. For p = 1 this is the
// length-K weight vector.
struct WeightMatrix {
    MatrixXd blocks;
    Index K = 0;
    Index p = 0;

    static WeightMatrix zero(Index K, Index p) { return {MatrixXd::Zero(K * p, p), K, p}; }
    // Identity block at column k, zeros elsewhere (PPI).
    static WeightMatrix unit(Index K, Index p, Index k);

    auto block(Index k) const { return blocks.middleRows(k * p, p); }
    VectorXd as_vector() const;  // requires p == 1
};

// Plug-in moments of the stacked score at a fixed theta.
//   gram:  (1/N) sum_{i<=N} S_i S_i'      (K p) x (K p)
//   cross: (1/n) sum_{i<=n} S_i s_i'      (K p) x p
// With centering, S is centered by its all-row mean and s by its labeled mean.
struct MomentEstimates {
    MatrixXd gram;
    MatrixXd cross;
    bool centered = true;
};

MomentEstimates estimate_moments(const Dataset& ds, const ScoreModel& model,
                                 const VectorXd& theta, bool centering);

inline constexpr double kDefaultRidgeScale = 1e-8;

struct RegularizedGram {
    MatrixXd matrix;
    double ridge = 0.0;
};

// gram + lambda I with lambda = ridge_scale * trace(gram) / dim. Throws
// ZeroGram when gram is identically zero.
RegularizedGram regularize_gram(const MatrixXd& gram, double ridge_scale);

// Solves regularize_gram(gram) * X = rhs. ZeroGram and ill-conditioned
// systems are reported as SingularGram.
struct GramSolve {
    MatrixXd solution;
    double ridge = 0.0;
};
GramSolve solve_gram(const MatrixXd& gram, const MatrixXd& rhs, double ridge_scale);

struct WeightOptions {
    bool centering = true;
    double ridge_scale = kDefaultRidgeScale;
};

struct WeightEstimate {
    WeightMatrix weights;
    MomentEstimates moments;
    double ridge = 0.0;
    // Whether weights already carry the (N - n) / N factor.
    bool includes_unlabeled_fraction = false;
};

// Mean-estimation closed form
//   w = (N-n)/N * [cov_N(yhat)]^{-1} * (1/n) sum_{i<=n} (yhat_i - mean_N yhat)(y_i - mean_n y).
// Works on the prediction columns directly, independent of any score model.
WeightEstimate estimate_mean_weights(const Dataset& ds, double ridge_scale = kDefaultRidgeScale);

// General plug-in gram^{-1} cross at theta_pilot, without the (N - n) / N
// factor.
WeightEstimate estimate_general_weights(const Dataset& ds, const ScoreModel& model,
                                        const VectorXd& theta_pilot,
                                        const WeightOptions& opts = {});

}  // namespace sada
