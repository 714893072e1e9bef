#include "sada/inference.hpp"

#include <cmath>
#include <string>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>

#include "sada/error.hpp"
#include "sada/solver.hpp"
#include "sada/weighting.hpp"

namespace sada {

namespace {

void check_level(double level) {
    if (!(level > 0.0 && level < 1.0)) {
        throw Error(ErrorCode::ConfigError, "confidence level must lie in (0, 1)");
    }
}

MatrixXd symmetrized(const MatrixXd& m) { return 0.5 * (m + m.transpose()); }

// Unfloored Omega, left empty when H is singular.
void fill_omega(SandwichParts& parts) {
    if (reciprocal_condition(parts.H_hat) >= kSingularRcond) {
        const MatrixXd Hinv = parts.H_hat.inverse();
        parts.omega = symmetrized(Hinv * parts.sigma_opt * Hinv.transpose());
    }
}

}  // namespace

MatrixXd estimate_hessian(const Dataset& ds, const ScoreModel& model, const VectorXd& theta) {
    return mean_labeled_jacobian(ds, model, theta);
}

MatrixXd estimate_sigma_nv(const Dataset& ds, const ScoreModel& model, const VectorXd& theta) {
    const MatrixXd s = labeled_scores(ds, model, theta);
    return symmetrized(s.transpose() * s / static_cast<double>(ds.n()));
}

MatrixXd estimate_sigma_g(const Dataset& ds, const ScoreModel& model, const VectorXd& theta,
                          bool centering, double ridge_scale) {
    const MomentEstimates m = estimate_moments(ds, model, theta, centering);
    const GramSolve solved = solve_gram(m.gram, m.cross, ridge_scale);
    return symmetrized(m.cross.transpose() * solved.solution);
}

MatrixXd estimate_weight_gain(const Dataset& ds, const ScoreModel& model, const VectorXd& theta,
                              const MatrixXd& weights, bool centering) {
    const MomentEstimates m = estimate_moments(ds, model, theta, centering);
    if (weights.rows() != m.cross.rows() || weights.cols() != m.cross.cols()) {
        throw Error(ErrorCode::DimensionMismatch, "weight matrix must be (K p) x p");
    }
    const double ratio = static_cast<double>(ds.N()) / static_cast<double>(ds.unlabeled());
    const MatrixXd wc = weights.transpose() * m.cross;
    return symmetrized(ratio * (wc + wc.transpose()) -
                       ratio * ratio * weights.transpose() * m.gram * weights);
}

SandwichParts sandwich_parts(const Dataset& ds, const ScoreModel& model, const VectorXd& theta,
                             bool centering, double ridge_scale) {
    SandwichParts parts;
    parts.unlabeled_fraction = ds.unlabeled_fraction();
    parts.H_hat = estimate_hessian(ds, model, theta);
    parts.sigma_nv = estimate_sigma_nv(ds, model, theta);

    const MomentEstimates m = estimate_moments(ds, model, theta, centering);
    const GramSolve solved = solve_gram(m.gram, m.cross, ridge_scale);
    parts.sigma_g = symmetrized(m.cross.transpose() * solved.solution);
    parts.ridge_used = solved.ridge;
    parts.sigma_opt = parts.sigma_nv - parts.unlabeled_fraction * parts.sigma_g;
    fill_omega(parts);
    return parts;
}

SandwichParts sandwich_parts_for_weights(const Dataset& ds, const ScoreModel& model,
                                         const VectorXd& theta, const MatrixXd& weights,
                                         bool centering) {
    SandwichParts parts;
    parts.unlabeled_fraction = ds.unlabeled_fraction();
    parts.H_hat = estimate_hessian(ds, model, theta);
    parts.sigma_nv = estimate_sigma_nv(ds, model, theta);
    if (weights.cwiseAbs().maxCoeff() > 0.0) {
        parts.sigma_g = estimate_weight_gain(ds, model, theta, weights, centering);
    } else {
        parts.sigma_g = MatrixXd::Zero(model.p, model.p);
    }
    parts.sigma_opt = parts.sigma_nv - parts.unlabeled_fraction * parts.sigma_g;
    fill_omega(parts);
    return parts;
}

double normal_quantile(double prob) {
    if (!(prob > 0.0 && prob < 1.0)) {
        throw Error(ErrorCode::ConfigError, "quantile probability must lie in (0, 1)");
    }
    return boost::math::quantile(boost::math::normal_distribution<double>(), prob);
}

double chi_square_quantile(double prob, int dof) {
    if (!(prob > 0.0 && prob < 1.0) || dof < 1) {
        throw Error(ErrorCode::ConfigError, "invalid chi-square quantile arguments");
    }
    return boost::math::quantile(boost::math::chi_squared_distribution<double>(dof), prob);
}

CovarianceResult covariance_and_intervals(const SandwichParts& parts, const VectorXd& theta_hat,
                                          Index n, double level) {
    check_level(level);
    if (n < 1) {
        throw Error(ErrorCode::ConfigError, "sample size must be positive");
    }
    const Index p = theta_hat.size();
    if (parts.H_hat.rows() != p || parts.sigma_opt.rows() != p) {
        throw Error(ErrorCode::DimensionMismatch, "sandwich parts do not match parameter length");
    }
    const double rc = reciprocal_condition(parts.H_hat);
    if (rc < kSingularRcond) {
        throw Error(ErrorCode::SingularHessian,
                    "Hessian estimate is singular (rcond " + std::to_string(rc) + ")");
    }

    CovarianceResult out;
    MatrixXd sigma = parts.sigma_opt;
    for (Index j = 0; j < p; ++j) {
        if (sigma(j, j) < 0.0) {
            sigma(j, j) = 0.0;
            ++out.floored_diagonals;
        }
    }
    const MatrixXd Hinv = parts.H_hat.inverse();
    out.omega = symmetrized(Hinv * sigma * Hinv.transpose());

    const double z = normal_quantile(0.5 + 0.5 * level);
    const double root_n = std::sqrt(static_cast<double>(n));
    out.intervals.reserve(p);
    for (Index j = 0; j < p; ++j) {
        const double half = std::sqrt(std::max(out.omega(j, j), 0.0)) * z / root_n;
        out.intervals.push_back({theta_hat(j) - half, theta_hat(j) + half, level});
    }
    return out;
}

bool in_confidence_region(const VectorXd& theta_hat, const MatrixXd& omega, Index n,
                          const VectorXd& theta, double level) {
    check_level(level);
    if (theta.size() != theta_hat.size() || omega.rows() != theta.size()) {
        throw Error(ErrorCode::DimensionMismatch, "confidence region dimensions differ");
    }
    const VectorXd diff = theta_hat - theta;
    const MatrixXd pinv = Eigen::CompleteOrthogonalDecomposition<MatrixXd>(omega).pseudoInverse();
    const double stat = static_cast<double>(n) * diff.dot(pinv * diff);
    return stat <= chi_square_quantile(level, static_cast<int>(theta.size()));
}

void attach_inference(EstimateReport& report, const Dataset& ds, const ScoreModel& model,
                      double level, const VectorXd* truth) {
    const VectorXd& theta = report.theta_hat;
    const bool centering = report.diagnostics.centering;
    SandwichParts parts;
    Index scale = ds.n();

    switch (report.method) {
        case Method::Sada:
            if (report.diagnostics.fallback_to_naive) {
                parts = sandwich_parts_for_weights(ds, model, theta,
                                                   MatrixXd::Zero(ds.K() * model.p, model.p),
                                                   centering);
            } else {
                parts = sandwich_parts(ds, model, theta, centering, report.diagnostics.ridge_scale);
                report.diagnostics.ridge_used = parts.ridge_used;
            }
            break;
        case Method::Naive:
        case Method::Ppi:
        case Method::PpiPlusPlus: {
            const MatrixXd w = report.weights ? report.weights->blocks
                                              : MatrixXd::Zero(ds.K() * model.p, model.p);
            parts = sandwich_parts_for_weights(ds, model, theta, w, centering);
            break;
        }
        case Method::Oracle: {
            if (truth == nullptr || truth->size() != ds.N()) {
                throw Error(ErrorCode::ConfigError, "oracle inference requires the truth vector");
            }
            MatrixXd H = MatrixXd::Zero(model.p, model.p);
            MatrixXd S = MatrixXd::Zero(model.p, model.p);
            for (Index i = 0; i < ds.N(); ++i) {
                const auto x = ds.features().row(i).transpose();
                const VectorXd s = model.score(x, (*truth)(i), theta);
                H += model.jacobian(x, (*truth)(i), theta);
                S += s * s.transpose();
            }
            const double inv_N = 1.0 / static_cast<double>(ds.N());
            parts.H_hat = H * inv_N;
            parts.sigma_nv = S * inv_N;
            parts.sigma_g = MatrixXd::Zero(model.p, model.p);
            parts.sigma_opt = parts.sigma_nv;
            scale = ds.N();
            break;
        }
    }

    CovarianceResult cov = covariance_and_intervals(parts, theta, scale, level);
    report.covariance = std::move(cov.omega);
    report.intervals = std::move(cov.intervals);
    report.scale_size = scale;
    report.diagnostics.floored_diagonals = cov.floored_diagonals;
    if (cov.floored_diagonals > 0) {
        report.diagnostics.notes.push_back("negative variance diagonal floored at zero");
    }
}

}  // namespace sada
