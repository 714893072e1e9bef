#pragma once

#include <vector>

#include <Eigen/Dense>

namespace sada {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

// Unvalidated arrays. Labels cover the leading rows; rows past labels.size()
// are unlabeled.
struct RawDataset {
    MatrixXd features;     // N x d (an empty 0x0 matrix means d = 0)
    VectorXd labels;       // n
    MatrixXd predictions;  // N x K
};

// Semi-supervised dataset with K prediction columns. Rows [0, n) are
// labeled, rows [n, N) unlabeled. Only constructible through
// validate_dataset, so every instance satisfies 1 <= n < N, K >= 1 and
// contains finite values only.
class Dataset {
public:
    const MatrixXd& features() const noexcept { return features_; }
    const VectorXd& labels() const noexcept { return labels_; }
    const MatrixXd& predictions() const noexcept { return predictions_; }

    Index n() const noexcept { return labels_.size(); }
    Index N() const noexcept { return predictions_.rows(); }
    Index K() const noexcept { return predictions_.cols(); }
    Index d() const noexcept { return features_.cols(); }
    Index unlabeled() const noexcept { return N() - n(); }

    // (N - n) / N, the share of unlabeled rows.
    double unlabeled_fraction() const noexcept {
        return static_cast<double>(unlabeled()) / static_cast<double>(N());
    }

    RawDataset to_raw() const { return {features_, labels_, predictions_}; }

    bool operator==(const Dataset& other) const;

private:
    Dataset(MatrixXd features, VectorXd labels, MatrixXd predictions)
        : features_(std::move(features)),
          labels_(std::move(labels)),
          predictions_(std::move(predictions)) {}

    friend Dataset validate_dataset(RawDataset raw);

    MatrixXd features_;
    VectorXd labels_;
    MatrixXd predictions_;
};

// Throws sada::Error with DimensionMismatch, NonFiniteValue, NoLabeledRows
// or NoUnlabeledRows.
Dataset validate_dataset(RawDataset raw);
Dataset validate_dataset(const Dataset& ds);

// Same dataset with prediction columns reordered: column j of the result is
// column order[j] of the input.
Dataset permute_predictions(const Dataset& ds, const std::vector<Index>& order);

}  // namespace sada
