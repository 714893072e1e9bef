#include "sada/weighting.hpp"

#include <string>

#include "sada/error.hpp"
#include "sada/solver.hpp"

namespace sada {

WeightMatrix WeightMatrix::unit(Index K, Index p, Index k) {
    if (k < 0 || k >= K) {
        throw Error(ErrorCode::DimensionMismatch, "prediction index out of range");
    }
    WeightMatrix w = zero(K, p);
    w.blocks.middleRows(k * p, p).setIdentity();
    return w;
}

VectorXd WeightMatrix::as_vector() const {
    if (p != 1) {
        throw Error(ErrorCode::DimensionMismatch, "weight matrix is not a vector (p != 1)");
    }
    return blocks.col(0);
}

namespace {

// Two-pass centering; constant columns come out exactly zero.
void center_columns(MatrixXd& m) {
    m.rowwise() -= m.colwise().mean();
    m.rowwise() -= m.colwise().mean();
}

}  // namespace

MomentEstimates estimate_moments(const Dataset& ds, const ScoreModel& model,
                                 const VectorXd& theta, bool centering) {
    MatrixXd stacked = stacked_scores(ds, model, theta);
    MatrixXd labeled = labeled_scores(ds, model, theta);
    if (centering) {
        center_columns(stacked);
        center_columns(labeled);
    }
    MomentEstimates m;
    m.centered = centering;
    m.gram = stacked.transpose() * stacked / static_cast<double>(ds.N());
    m.cross = stacked.topRows(ds.n()).transpose() * labeled / static_cast<double>(ds.n());
    // Exact symmetry for downstream LDLT.
    m.gram = 0.5 * (m.gram + m.gram.transpose()).eval();
    return m;
}

RegularizedGram regularize_gram(const MatrixXd& gram, double ridge_scale) {
    if (gram.rows() != gram.cols()) {
        throw Error(ErrorCode::DimensionMismatch, "gram matrix is not square");
    }
    if (!(ridge_scale >= 0.0)) {
        throw Error(ErrorCode::ConfigError, "ridge scale must be nonnegative");
    }
    if (gram.size() == 0 || gram.cwiseAbs().maxCoeff() == 0.0) {
        throw Error(ErrorCode::ZeroGram, "gram matrix is identically zero");
    }
    const double lambda = ridge_scale * gram.trace() / static_cast<double>(gram.rows());
    RegularizedGram out;
    out.ridge = lambda;
    out.matrix = gram;
    out.matrix.diagonal().array() += lambda;
    return out;
}

GramSolve solve_gram(const MatrixXd& gram, const MatrixXd& rhs, double ridge_scale) {
    RegularizedGram reg;
    try {
        reg = regularize_gram(gram, ridge_scale);
    } catch (const Error& e) {
        if (e.code() == ErrorCode::ZeroGram) {
            throw Error(ErrorCode::SingularGram, e.what());
        }
        throw;
    }
    Eigen::LDLT<MatrixXd> ldlt(reg.matrix);
    double rc = ldlt.info() == Eigen::Success ? ldlt.rcond() : 0.0;
    // Eigen's rcond estimate skips exactly-zero pivots.
    const VectorXd pivots = ldlt.vectorD().cwiseAbs();
    if (pivots.size() > 0 && !(pivots.minCoeff() >= kSingularRcond * pivots.maxCoeff())) rc = 0.0;
    if (!(rc >= kSingularRcond)) {
        throw Error(ErrorCode::SingularGram,
                    "gram matrix is singular after regularization (rcond " + std::to_string(rc) +
                        ")");
    }
    return {ldlt.solve(rhs), reg.ridge};
}

WeightEstimate estimate_mean_weights(const Dataset& ds, double ridge_scale) {
    const MatrixXd& preds = ds.predictions();
    const VectorXd& y = ds.labels();
    const Index n = ds.n();

    MatrixXd centered = preds;
    center_columns(centered);
    MatrixXd y_centered = y;
    center_columns(y_centered);

    MomentEstimates m;
    m.centered = true;
    m.gram = centered.transpose() * centered / static_cast<double>(ds.N());
    m.gram = 0.5 * (m.gram + m.gram.transpose()).eval();
    m.cross = centered.topRows(n).transpose() * y_centered / static_cast<double>(n);

    GramSolve solved = solve_gram(m.gram, m.cross, ridge_scale);
    WeightEstimate out;
    out.weights = {ds.unlabeled_fraction() * solved.solution, ds.K(), 1};
    out.moments = std::move(m);
    out.ridge = solved.ridge;
    out.includes_unlabeled_fraction = true;
    return out;
}

WeightEstimate estimate_general_weights(const Dataset& ds, const ScoreModel& model,
                                        const VectorXd& theta_pilot, const WeightOptions& opts) {
    if (!theta_pilot.allFinite()) {
        throw Error(ErrorCode::NonFiniteValue, "pilot estimate is not finite");
    }
    MomentEstimates m = estimate_moments(ds, model, theta_pilot, opts.centering);
    GramSolve solved = solve_gram(m.gram, m.cross, opts.ridge_scale);
    WeightEstimate out;
    out.weights = {std::move(solved.solution), ds.K(), model.p};
    out.moments = std::move(m);
    out.ridge = solved.ridge;
    out.includes_unlabeled_fraction = false;
    return out;
}

}  // namespace sada
