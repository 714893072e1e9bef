#include "sada/estimators.hpp"

#include <cmath>
#include <string>

#include "sada/error.hpp"

namespace sada {

std::string_view method_tag(Method m) {
    switch (m) {
        case Method::Naive: return "naive";
        case Method::Ppi: return "ppi";
        case Method::PpiPlusPlus: return "ppi_pp";
        case Method::Sada: return "sada";
        case Method::Oracle: return "oracle";
    }
    return "unknown";
}

std::optional<Method> method_from_tag(std::string_view tag) {
    for (Method m : {Method::Naive, Method::Ppi, Method::PpiPlusPlus, Method::Sada,
                     Method::Oracle}) {
        if (method_tag(m) == tag) return m;
    }
    return std::nullopt;
}

std::string EstimateReport::label() const {
    std::string out(method_tag(method));
    if (prediction_index) {
        out += "_" + std::to_string(*prediction_index + 1);
    }
    return out;
}

namespace {

void check_column(const Dataset& ds, Index k) {
    if (k < 0 || k >= ds.K()) {
        throw Error(ErrorCode::ConfigError, "prediction column " + std::to_string(k + 1) +
                                                " out of range 1.." + std::to_string(ds.K()));
    }
}

EstimateReport make_report(Method method, const SolveResult& solved, const Dataset& ds) {
    EstimateReport r;
    r.method = method;
    r.theta_hat = solved.theta;
    r.scale_size = ds.n();
    r.diagnostics.solver_iterations = solved.iterations;
    return r;
}

}  // namespace

SolveResult weighted_estimate(const Dataset& ds, const ScoreModel& model, const MatrixXd& weights,
                              const SolverConfig& cfg, const VectorXd& theta0) {
    const Index p = model.p;
    const Index K = ds.K();
    if (weights.rows() != K * p || weights.cols() != p) {
        throw Error(ErrorCode::DimensionMismatch, "weight matrix must be (K p) x p");
    }
    const double inv_n = 1.0 / static_cast<double>(ds.n());
    const double inv_u = 1.0 / static_cast<double>(ds.unlabeled());
    const bool has_weights = weights.cwiseAbs().maxCoeff() > 0.0;

    auto residual = [&](const VectorXd& theta) -> VectorXd {
        VectorXd r = labeled_scores(ds, model, theta).colwise().sum().transpose() * inv_n;
        if (has_weights) {
            const MatrixXd S = stacked_scores(ds, model, theta);
            const VectorXd diff =
                S.bottomRows(ds.unlabeled()).colwise().sum().transpose() * inv_u -
                S.topRows(ds.n()).colwise().sum().transpose() * inv_n;
            r += weights.transpose() * diff;
        }
        return r;
    };
    auto jacobian = [&](const VectorXd& theta) -> MatrixXd {
        MatrixXd J = mean_labeled_jacobian(ds, model, theta);
        if (has_weights) {
            MatrixXd lab = MatrixXd::Zero(K * p, p);
            MatrixXd unl = MatrixXd::Zero(K * p, p);
            for (Index i = 0; i < ds.N(); ++i) {
                MatrixXd Ji = stacked_jacobian(model, ds.features().row(i).transpose(),
                                               ds.predictions().row(i).transpose(), theta);
                (i < ds.n() ? lab : unl) += Ji;
            }
            J += weights.transpose() * (unl * inv_u - lab * inv_n);
        }
        return J;
    };
    return solve_estimating_equation(residual, jacobian, theta0, cfg);
}

EstimateReport naive_estimate(const Dataset& ds, const ScoreModel& model, const SolverConfig& cfg) {
    const SolveResult solved = weighted_estimate(ds, model, WeightMatrix::zero(ds.K(), model.p).blocks,
                                                 cfg, VectorXd::Zero(model.p));
    EstimateReport r = make_report(Method::Naive, solved, ds);
    r.weights = WeightMatrix::zero(ds.K(), model.p);
    return r;
}

EstimateReport ppi_estimate(const Dataset& ds, const ScoreModel& model, Index k,
                            const SolverConfig& cfg) {
    check_column(ds, k);
    const WeightMatrix w = WeightMatrix::unit(ds.K(), model.p, k);
    const SolveResult solved = weighted_estimate(ds, model, w.blocks, cfg, VectorXd::Zero(model.p));
    EstimateReport r = make_report(Method::Ppi, solved, ds);
    r.prediction_index = k;
    r.weights = w;
    r.diagnostics.unlabeled_fraction_applied = false;
    if (ds.K() > 1 && model.p > 1) {
        r.diagnostics.notes.push_back("per-column identity weight applied to column " +
                                      std::to_string(k + 1) + " of " + std::to_string(ds.K()));
    }
    return r;
}

EstimateReport ppi_pp_estimate(const Dataset& ds, const ScoreModel& model, Index k,
                               const EstimatorOptions& opts) {
    check_column(ds, k);
    const Index p = model.p;
    const EstimateReport pilot = naive_estimate(ds, model, opts.solver);

    const MomentEstimates m = estimate_moments(ds, model, pilot.theta_hat, opts.centering);
    MatrixXd V = m.gram.block(k * p, k * p, p, p);
    const MatrixXd C = m.cross.middleRows(k * p, p);
    const double ridge = opts.ridge_scale * V.trace() / static_cast<double>(p);
    V.diagonal().array() += ridge;

    const MatrixXd H = mean_labeled_jacobian(ds, model, pilot.theta_hat);
    if (reciprocal_condition(H) < kSingularRcond) {
        throw Error(ErrorCode::SingularHessian, "labeled score Jacobian is singular");
    }
    const MatrixXd Hinv = H.inverse();
    const double num = (Hinv * C * Hinv).trace();
    const double den = (Hinv * V * Hinv).trace();

    EstimateReport r;
    double omega = 0.0;
    if (den > 0.0 && std::isfinite(num / den)) {
        omega = ds.unlabeled_fraction() * num / den;
    } else {
        r.diagnostics.notes.push_back("degenerate prediction variance; weight set to zero");
    }

    const WeightMatrix w{omega * WeightMatrix::unit(ds.K(), p, k).blocks, ds.K(), p};
    const SolveResult solved = weighted_estimate(ds, model, w.blocks, opts.solver, pilot.theta_hat);
    r.method = Method::PpiPlusPlus;
    r.theta_hat = solved.theta;
    r.scale_size = ds.n();
    r.prediction_index = k;
    r.weights = w;
    r.diagnostics.centering = opts.centering;
    r.diagnostics.ridge_scale = opts.ridge_scale;
    r.diagnostics.ridge_used = ridge;
    r.diagnostics.unlabeled_fraction_applied = true;
    r.diagnostics.solver_iterations = solved.iterations;
    r.diagnostics.weighting_passes = 1;
    r.diagnostics.scalar_weight = omega;
    return r;
}

EstimateReport sada_estimate(const Dataset& ds, const ScoreModel& model,
                             const EstimatorOptions& opts) {
    if (opts.extra_passes < 0) {
        throw Error(ErrorCode::ConfigError, "extra_passes must be >= 0");
    }
    EstimateReport pilot = naive_estimate(ds, model, opts.solver);

    EstimateReport r;
    r.method = Method::Sada;
    r.scale_size = ds.n();
    r.diagnostics.centering = opts.centering;
    r.diagnostics.ridge_scale = opts.ridge_scale;

    VectorXd theta = pilot.theta_hat;
    try {
        for (int pass = 0; pass <= opts.extra_passes; ++pass) {
            WeightEstimate est = estimate_general_weights(ds, model, theta,
                                                          {opts.centering, opts.ridge_scale});
            est.weights.blocks *= ds.unlabeled_fraction();
            const SolveResult solved =
                weighted_estimate(ds, model, est.weights.blocks, opts.solver, theta);
            theta = solved.theta;
            r.weights = std::move(est.weights);
            r.diagnostics.ridge_used = est.ridge;
            r.diagnostics.solver_iterations += solved.iterations;
            r.diagnostics.weighting_passes = pass + 1;
        }
    } catch (const Error& e) {
        if (e.code() != ErrorCode::SingularGram) throw;
        pilot.method = Method::Sada;
        pilot.diagnostics.centering = opts.centering;
        pilot.diagnostics.ridge_scale = opts.ridge_scale;
        pilot.diagnostics.fallback_to_naive = true;
        pilot.diagnostics.notes.push_back(std::string("WeightEstimationFailed: ") + e.what());
        return pilot;
    }
    r.theta_hat = theta;
    r.diagnostics.unlabeled_fraction_applied = true;
    return r;
}

EstimateReport oracle_estimate(const Dataset& ds, const VectorXd& truth, const ScoreModel& model,
                               const SolverConfig& cfg) {
    if (truth.size() != ds.N()) {
        throw Error(ErrorCode::DimensionMismatch, "truth vector must have N entries");
    }
    if (!truth.allFinite()) {
        throw Error(ErrorCode::NonFiniteValue, "non-finite value in truth vector");
    }
    const double inv_N = 1.0 / static_cast<double>(ds.N());
    auto residual = [&](const VectorXd& theta) -> VectorXd {
        VectorXd r = VectorXd::Zero(model.p);
        for (Index i = 0; i < ds.N(); ++i) {
            r += model.score(ds.features().row(i).transpose(), truth(i), theta);
        }
        return r * inv_N;
    };
    auto jacobian = [&](const VectorXd& theta) -> MatrixXd {
        MatrixXd J = MatrixXd::Zero(model.p, model.p);
        for (Index i = 0; i < ds.N(); ++i) {
            J += model.jacobian(ds.features().row(i).transpose(), truth(i), theta);
        }
        return J * inv_N;
    };
    const SolveResult solved =
        solve_estimating_equation(residual, jacobian, VectorXd::Zero(model.p), cfg);
    EstimateReport r = make_report(Method::Oracle, solved, ds);
    r.scale_size = ds.N();
    return r;
}

}  // namespace sada
