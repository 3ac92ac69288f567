// errors.hpp — Exception types raised by the library

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace poissonbath {

enum class ErrorCode {
    dimension_mismatch,
    non_hermitian_input,
    overflow,
    negative_rate,
    step_size_underflow,
    tolerance_not_met,
    degenerate_kernel,
    no_physical_state,
    cost_guard_exceeded,
    size_guard_exceeded,
    quadrature_not_converged,
    invalid_argument,
};

inline std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::dimension_mismatch: return "DimensionMismatch";
        case ErrorCode::non_hermitian_input: return "NonHermitianInput";
        case ErrorCode::overflow: return "Overflow";
        case ErrorCode::negative_rate: return "NegativeRate";
        case ErrorCode::step_size_underflow: return "StepSizeUnderflow";
        case ErrorCode::tolerance_not_met: return "ToleranceNotMet";
        case ErrorCode::degenerate_kernel: return "DegenerateKernel";
        case ErrorCode::no_physical_state: return "NoPhysicalState";
        case ErrorCode::cost_guard_exceeded: return "CostGuardExceeded";
        case ErrorCode::size_guard_exceeded: return "SizeGuardExceeded";
        case ErrorCode::quadrature_not_converged: return "QuadratureNotConverged";
        case ErrorCode::invalid_argument: return "InvalidArgument";
    }
    return "Unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

template <ErrorCode C>
struct CodedError : Error {
    explicit CodedError(const std::string& what) : Error(C, what) {}
};

using DimensionMismatch = CodedError<ErrorCode::dimension_mismatch>;
using NonHermitianInput = CodedError<ErrorCode::non_hermitian_input>;
using Overflow = CodedError<ErrorCode::overflow>;
using NegativeRate = CodedError<ErrorCode::negative_rate>;
using StepSizeUnderflow = CodedError<ErrorCode::step_size_underflow>;
using ToleranceNotMet = CodedError<ErrorCode::tolerance_not_met>;
using DegenerateKernel = CodedError<ErrorCode::degenerate_kernel>;
using NoPhysicalState = CodedError<ErrorCode::no_physical_state>;
using CostGuardExceeded = CodedError<ErrorCode::cost_guard_exceeded>;
using SizeGuardExceeded = CodedError<ErrorCode::size_guard_exceeded>;
using QuadratureNotConverged = CodedError<ErrorCode::quadrature_not_converged>;
using InvalidArgument = CodedError<ErrorCode::invalid_argument>;

} // namespace poissonbath
