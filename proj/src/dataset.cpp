#include "sada/dataset.hpp"

#include <string>

#include "sada/error.hpp"

namespace sada {

namespace {

std::string shape(const MatrixXd& m) {
    return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

}  // namespace

bool Dataset::operator==(const Dataset& other) const {
    return features_.rows() == other.features_.rows() &&
           features_.cols() == other.features_.cols() && labels_.size() == other.labels_.size() &&
           predictions_.rows() == other.predictions_.rows() &&
           predictions_.cols() == other.predictions_.cols() && features_ == other.features_ &&
           labels_ == other.labels_ && predictions_ == other.predictions_;
}

Dataset validate_dataset(RawDataset raw) {
    const Index N = raw.predictions.rows();
    const Index K = raw.predictions.cols();
    const Index n = raw.labels.size();

    if (K < 1) {
        throw Error(ErrorCode::DimensionMismatch, "at least one prediction column is required");
    }
    if (raw.features.size() == 0 && raw.features.rows() == 0) {
        raw.features.resize(N, 0);
    }
    if (raw.features.rows() != N) {
        throw Error(ErrorCode::DimensionMismatch, "features are " + shape(raw.features) +
                                                      " but predictions have " +
                                                      std::to_string(N) + " rows");
    }
    if (n < 1) {
        throw Error(ErrorCode::NoLabeledRows, "dataset has no labeled rows");
    }
    if (n > N) {
        throw Error(ErrorCode::DimensionMismatch, std::to_string(n) + " labels for " +
                                                      std::to_string(N) + " rows");
    }
    if (n == N) {
        throw Error(ErrorCode::NoUnlabeledRows, "dataset has no unlabeled rows");
    }
    if (!raw.features.allFinite()) {
        throw Error(ErrorCode::NonFiniteValue, "non-finite value in features");
    }
    if (!raw.labels.allFinite()) {
        throw Error(ErrorCode::NonFiniteValue, "non-finite value in labels");
    }
    if (!raw.predictions.allFinite()) {
        throw Error(ErrorCode::NonFiniteValue, "non-finite value in predictions");
    }
    return Dataset(std::move(raw.features), std::move(raw.labels), std::move(raw.predictions));
}

Dataset validate_dataset(const Dataset& ds) { return validate_dataset(ds.to_raw()); }

Dataset permute_predictions(const Dataset& ds, const std::vector<Index>& order) {
    if (static_cast<Index>(order.size()) != ds.K()) {
        throw Error(ErrorCode::DimensionMismatch, "permutation length differs from K");
    }
    RawDataset raw = ds.to_raw();
    for (Index j = 0; j < ds.K(); ++j) {
        if (order[j] < 0 || order[j] >= ds.K()) {
            throw Error(ErrorCode::DimensionMismatch, "permutation index out of range");
        }
        raw.predictions.col(j) = ds.predictions().col(order[j]);
    }
    return validate_dataset(std::move(raw));
}

}  // namespace sada
