#include "hcontact/error.hpp"

namespace hcontact {

std::string_view to_string(ErrorKind kind) noexcept
{
    switch (kind) {
    case ErrorKind::DomainError: return "DomainError";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::QuadratureNotConverged: return "QuadratureNotConverged";
    case ErrorKind::NotClosed: return "NotClosed";
    case ErrorKind::UnsupportedDomain: return "UnsupportedDomain";
    case ErrorKind::DegenerateInput: return "DegenerateInput";
    case ErrorKind::SingularSystem: return "SingularSystem";
    case ErrorKind::PotentialMismatch: return "PotentialMismatch";
    case ErrorKind::TwistNotClosed: return "TwistNotClosed";
    case ErrorKind::ImageEscapesDomain: return "ImageEscapesDomain";
    case ErrorKind::NotScaleSymplectic: return "NotScaleSymplectic";
    case ErrorKind::BaseMismatch: return "BaseMismatch";
    case ErrorKind::NotAPotential: return "NotAPotential";
    case ErrorKind::DegeneratePullback: return "DegeneratePullback";
    case ErrorKind::NotInContactHyperplane: return "NotInContactHyperplane";
    case ErrorKind::TangencyViolation: return "TangencyViolation";
    case ErrorKind::ParamOutOfRange: return "ParamOutOfRange";
    case ErrorKind::IntermediatePointEscapes: return "IntermediatePointEscapes";
    case ErrorKind::DegenerateDirection: return "DegenerateDirection";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::UnknownName: return "UnknownName";
    case ErrorKind::ArityMismatch: return "ArityMismatch";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    }
    return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& message, double residual)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message),
      kind_(kind),
      residual_(residual),
      message_(message)
{
}

ParseError::ParseError(const std::string& message, int line, int column, std::string token)
    : Error(ErrorKind::ParseError,
            message + " at " + std::to_string(line) + ":" + std::to_string(column) +
                (token.empty() ? std::string() : " near '" + token + "'")),
      raw_(message),
      line_(line),
      column_(column),
      token_(std::move(token))
{
}

ParseError ParseError::relocated(int line, int column_offset) const
{
    return ParseError(raw_, line, column_offset + column_, token_);
}

} // namespace hcontact
