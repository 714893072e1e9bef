#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sada {

enum class ErrorCode {
    // data
    DimensionMismatch,
    NonFiniteValue,
    NoUnlabeledRows,
    NoLabeledRows,
    SchemaError,
    ParseError,
    // configuration
    ConfigError,
    // numerical
    SingularJacobian,
    NonConvergence,
    SingularGram,
    ZeroGram,
    SingularHessian,
    WeightEstimationFailed,
    ReplicateFailed,
    // environment
    IoError,
};

enum class ErrorCategory { Config, Data, Numerical, Io };

std::string_view error_code_name(ErrorCode code);
ErrorCategory error_category(ErrorCode code);

// Single exception type; the code drives CLI exit status.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }
    ErrorCategory category() const noexcept { return error_category(code_); }
    std::string_view name() const noexcept { return error_code_name(code_); }

private:
    ErrorCode code_;
};

}  // namespace sada
