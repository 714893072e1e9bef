#include "sada/error.hpp"

namespace sada {

std::string_view error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::NonFiniteValue: return "NonFiniteValue";
        case ErrorCode::NoUnlabeledRows: return "NoUnlabeledRows";
        case ErrorCode::NoLabeledRows: return "NoLabeledRows";
        case ErrorCode::SchemaError: return "SchemaError";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::ConfigError: return "ConfigError";
        case ErrorCode::SingularJacobian: return "SingularJacobian";
        case ErrorCode::NonConvergence: return "NonConvergence";
        case ErrorCode::SingularGram: return "SingularGram";
        case ErrorCode::ZeroGram: return "ZeroGram";
        case ErrorCode::SingularHessian: return "SingularHessian";
        case ErrorCode::WeightEstimationFailed: return "WeightEstimationFailed";
        case ErrorCode::ReplicateFailed: return "ReplicateFailed";
        case ErrorCode::IoError: return "IoError";
    }
    return "UnknownError";
}

ErrorCategory error_category(ErrorCode code) {
    switch (code) {
        case ErrorCode::DimensionMismatch:
        case ErrorCode::NonFiniteValue:
        case ErrorCode::NoUnlabeledRows:
        case ErrorCode::NoLabeledRows:
        case ErrorCode::SchemaError:
        case ErrorCode::ParseError:
            return ErrorCategory::Data;
        case ErrorCode::ConfigError:
            return ErrorCategory::Config;
        case ErrorCode::IoError:
            return ErrorCategory::Io;
        default:
            return ErrorCategory::Numerical;
    }
}

}  // namespace sada
