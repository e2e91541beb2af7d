#pragma once

#include <complex>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>

namespace hcontact {

using cplx = std::complex<double>;

enum class ErrorKind {
    DomainError,
    DimensionMismatch,
    QuadratureNotConverged,
    NotClosed,
    UnsupportedDomain,
    DegenerateInput,
    SingularSystem,
    PotentialMismatch,
    TwistNotClosed,
    ImageEscapesDomain,
    NotScaleSymplectic,
    BaseMismatch,
    NotAPotential,
    DegeneratePullback,
    NotInContactHyperplane,
    TangencyViolation,
    ParamOutOfRange,
    IntermediatePointEscapes,
    DegenerateDirection,
    ParseError,
    UnknownName,
    ArityMismatch,
    InvalidArgument,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Every failure raised by the library. `residual()` carries the offending
/// measurement (max residual, min volume, ...) when one exists, NaN otherwise.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message,
          double residual = std::numeric_limits<double>::quiet_NaN());

    ErrorKind kind() const noexcept { return kind_; }
    double residual() const noexcept { return residual_; }
    const std::string& message() const noexcept { return message_; }

private:
    ErrorKind kind_;
    double residual_;
    std::string message_;
};

/// Parse failure with a 1-based source location and the offending token.
class ParseError : public Error {
public:
    ParseError(const std::string& message, int line, int column, std::string token);

    int line() const noexcept { return line_; }
    int column() const noexcept { return column_; }
    const std::string& token() const noexcept { return token_; }

    /// Relocates an error raised inside an embedded string (an expression or a
    /// form literal) into the coordinates of the enclosing document.
    ParseError relocated(int line, int column_offset) const;

private:
    std::string raw_;
    int line_;
    int column_;
    std::string token_;
};

} // namespace hcontact
