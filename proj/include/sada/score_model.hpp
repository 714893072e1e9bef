#pragma once

#include <functional>
#include <string>
#include <string_view>

#include <Eigen/Dense>

#include "sada/dataset.hpp"

namespace sada {

using RowRef = Eigen::Ref<const VectorXd>;

// Score s(x, y; theta) = d loss / d theta together with its Jacobian
// d s / d theta^T. The Jacobian is stored with its natural sign, so the mean
// model has Jacobian -1.
struct ScoreModel {
    std::string name;
    Index p = 0;
    std::function<VectorXd(const RowRef& x, double y, const VectorXd& theta)> score;
    std::function<MatrixXd(const RowRef& x, double y, const VectorXd& theta)> jacobian;
};

// s = y - theta.
ScoreModel mean_model();
// s = (y - x'theta) x over a d-dimensional feature row.
ScoreModel ols_model(Index d);
// s = (y - sigmoid(x'theta)) x. Not affine in theta; exercises the damped
// Newton path.
ScoreModel logistic_model(Index d);

// "mean" | "ols" | "logistic"; the feature dimension is ignored for "mean".
ScoreModel model_by_name(std::string_view name, Index d);

// Concatenation (s(x, yhat_1; theta)', ..., s(x, yhat_K; theta)')'.
struct StackedScore {
    VectorXd value;
    Index p = 0;

    Index K() const noexcept { return p == 0 ? 0 : value.size() / p; }
    auto block(Index k) const { return value.segment(k * p, p); }
};

StackedScore stacked_score(const ScoreModel& model, const RowRef& x, const RowRef& preds,
                           const VectorXd& theta);

// (K p) x p matrix whose k-th block is the score Jacobian at yhat_k.
MatrixXd stacked_jacobian(const ScoreModel& model, const RowRef& x, const RowRef& preds,
                          const VectorXd& theta);

// Row-wise evaluations over a dataset. Row i of the result is the score
// (length p) or stacked score (length K p) for dataset row first + i.
MatrixXd labeled_scores(const Dataset& ds, const ScoreModel& model, const VectorXd& theta);
MatrixXd stacked_scores(const Dataset& ds, const ScoreModel& model, const VectorXd& theta);

// Average score Jacobian over the labeled rows.
MatrixXd mean_labeled_jacobian(const Dataset& ds, const ScoreModel& model, const VectorXd& theta);

}  // namespace sada
