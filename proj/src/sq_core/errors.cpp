#include "sketch_sfa/sq_core/errors.hpp"

namespace sketch_sfa {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidInput: return "InvalidInput";
    case ErrorKind::IndexError: return "IndexError";
    case ErrorKind::DegenerateDistribution: return "DegenerateDistribution";
    case ErrorKind::EmptySpectrum: return "EmptySpectrum";
    case ErrorKind::BudgetExceeded: return "BudgetExceeded";
    case ErrorKind::RejectionStall: return "RejectionStall";
    case ErrorKind::RankDeficient: return "RankDeficient";
  }
  return "Unknown";
}

namespace {

std::string format_what(ErrorKind kind, const std::string& message, const std::string& step) {
  std::string out;
  if (!step.empty()) out += "[" + step + "] ";
  out += std::string(to_string(kind)) + ": " + message;
  return out;
}

}  // namespace

Error::Error(ErrorKind kind, const std::string& message, std::string step)
    : std::runtime_error(format_what(kind, message, step)),
      kind_(kind),
      message_(message),
      step_(std::move(step)) {}

void rethrow_with_step(const Error& error, const std::string& step) {
  const auto& msg = error.message();
  switch (error.kind()) {
    case ErrorKind::InvalidInput: throw InvalidInput(msg, step);
    case ErrorKind::IndexError: throw IndexError(msg, step);
    case ErrorKind::DegenerateDistribution: throw DegenerateDistribution(msg, step);
    case ErrorKind::EmptySpectrum: throw EmptySpectrum(msg, step);
    case ErrorKind::BudgetExceeded: throw BudgetExceeded(msg, step);
    case ErrorKind::RejectionStall: throw RejectionStall(msg, step);
    case ErrorKind::RankDeficient:
      throw RankDeficient(msg, static_cast<const RankDeficient&>(error).theta(), step);
  }
  throw Error(error.kind(), msg, step);
}

}  // namespace sketch_sfa
