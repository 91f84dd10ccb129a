#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace perpetuity {

enum class ErrorKind {
  InvalidArgument,
  InvalidSpec,
  UnsupportedRegime,
  DegenerateModel,
  TruncationFailure,
  InfeasibleParameter,
  OutOfDomain,
  HypothesisViolation,
  BudgetExceeded,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// All library failures surface as this exception; `kind()` identifies the
/// contract that was violated.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::InvalidSpec: return "InvalidSpec";
    case ErrorKind::UnsupportedRegime: return "UnsupportedRegime";
    case ErrorKind::DegenerateModel: return "DegenerateModel";
    case ErrorKind::TruncationFailure: return "TruncationFailure";
    case ErrorKind::InfeasibleParameter: return "InfeasibleParameter";
    case ErrorKind::OutOfDomain: return "OutOfDomain";
    case ErrorKind::HypothesisViolation: return "HypothesisViolation";
    case ErrorKind::BudgetExceeded: return "BudgetExceeded";
  }
  return "Unknown";
}

}  // namespace perpetuity
