#include "sada/score_model.hpp"

#include <cmath>

#include "sada/error.hpp"

namespace sada {

ScoreModel mean_model() {
    ScoreModel m;
    m.name = "mean";
    m.p = 1;
    m.score = [](const RowRef&, double y, const VectorXd& theta) {
        return VectorXd::Constant(1, y - theta(0));
    };
    m.jacobian = [](const RowRef&, double, const VectorXd&) {
        return MatrixXd::Constant(1, 1, -1.0);
    };
    return m;
}

ScoreModel ols_model(Index d) {
    if (d < 1) {
        throw Error(ErrorCode::ConfigError, "ols model needs at least one feature column");
    }
    ScoreModel m;
    m.name = "ols";
    m.p = d;
    m.score = [d](const RowRef& x, double y, const VectorXd& theta) -> VectorXd {
        if (x.size() != d) {
            throw Error(ErrorCode::DimensionMismatch, "feature row length differs from model");
        }
        return (y - x.dot(theta)) * x;
    };
    m.jacobian = [d](const RowRef& x, double, const VectorXd&) -> MatrixXd {
        if (x.size() != d) {
            throw Error(ErrorCode::DimensionMismatch, "feature row length differs from model");
        }
        return -(x * x.transpose());
    };
    return m;
}

ScoreModel logistic_model(Index d) {
    if (d < 1) {
        throw Error(ErrorCode::ConfigError, "logistic model needs at least one feature column");
    }
    ScoreModel m;
    m.name = "logistic";
    m.p = d;
    m.score = [d](const RowRef& x, double y, const VectorXd& theta) -> VectorXd {
        if (x.size() != d) {
            throw Error(ErrorCode::DimensionMismatch, "feature row length differs from model");
        }
        const double mu = 1.0 / (1.0 + std::exp(-x.dot(theta)));
        return (y - mu) * x;
    };
    m.jacobian = [d](const RowRef& x, double, const VectorXd& theta) -> MatrixXd {
        if (x.size() != d) {
            throw Error(ErrorCode::DimensionMismatch, "feature row length differs from model");
        }
        const double mu = 1.0 / (1.0 + std::exp(-x.dot(theta)));
        return -mu * (1.0 - mu) * (x * x.transpose());
    };
    return m;
}

ScoreModel model_by_name(std::string_view name, Index d) {
    if (name == "mean") return mean_model();
    if (name == "ols") return ols_model(d);
    if (name == "logistic") return logistic_model(d);
    throw Error(ErrorCode::ConfigError, "unknown model '" + std::string(name) + "'");
}

StackedScore stacked_score(const ScoreModel& model, const RowRef& x, const RowRef& preds,
                           const VectorXd& theta) {
    if (theta.size() != model.p) {
        throw Error(ErrorCode::DimensionMismatch, "parameter length differs from model dimension");
    }
    const Index K = preds.size();
    StackedScore out;
    out.p = model.p;
    out.value.resize(K * model.p);
    for (Index k = 0; k < K; ++k) {
        out.value.segment(k * model.p, model.p) = model.score(x, preds(k), theta);
    }
    return out;
}

MatrixXd stacked_jacobian(const ScoreModel& model, const RowRef& x, const RowRef& preds,
                          const VectorXd& theta) {
    const Index K = preds.size();
    const Index p = model.p;
    MatrixXd out(K * p, p);
    for (Index k = 0; k < K; ++k) {
        out.middleRows(k * p, p) = model.jacobian(x, preds(k), theta);
    }
    return out;
}

MatrixXd labeled_scores(const Dataset& ds, const ScoreModel& model, const VectorXd& theta) {
    MatrixXd out(ds.n(), model.p);
    for (Index i = 0; i < ds.n(); ++i) {
        out.row(i) = model.score(ds.features().row(i).transpose(), ds.labels()(i), theta).transpose();
    }
    return out;
}

MatrixXd stacked_scores(const Dataset& ds, const ScoreModel& model, const VectorXd& theta) {
    MatrixXd out(ds.N(), ds.K() * model.p);
    for (Index i = 0; i < ds.N(); ++i) {
        out.row(i) = stacked_score(model, ds.features().row(i).transpose(),
                                   ds.predictions().row(i).transpose(), theta)
                         .value.transpose();
    }
    return out;
}

MatrixXd mean_labeled_jacobian(const Dataset& ds, const ScoreModel& model, const VectorXd& theta) {
    MatrixXd acc = MatrixXd::Zero(model.p, model.p);
    for (Index i = 0; i < ds.n(); ++i) {
        acc += model.jacobian(ds.features().row(i).transpose(), ds.labels()(i), theta);
    }
    return acc / static_cast<double>(ds.n());
}

}  // namespace sada
