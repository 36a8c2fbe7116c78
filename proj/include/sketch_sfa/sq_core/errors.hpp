#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sketch_sfa {

enum class ErrorKind {
  InvalidInput,
  IndexError,
  DegenerateDistribution,
  EmptySpectrum,
  BudgetExceeded,
  RejectionStall,
  RankDeficient,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Base of every error raised by the library. `step()` is non-empty when the
/// error was raised inside a tagged pipeline step (e.g. "step4").
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message, std::string step = {});

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& step() const noexcept { return step_; }
  const std::string& message() const noexcept { return message_; }

 private:
  ErrorKind kind_;
  std::string message_;
  std::string step_;
};

#define SKETCH_SFA_DEFINE_ERROR(Name)                                   \
  class Name : public Error {                                           \
   public:                                                              \
    explicit Name(const std::string& message, std::string step = {})    \
        : Error(ErrorKind::Name, message, std::move(step)) {}           \
  };

SKETCH_SFA_DEFINE_ERROR(InvalidInput)
SKETCH_SFA_DEFINE_ERROR(IndexError)
SKETCH_SFA_DEFINE_ERROR(DegenerateDistribution)
SKETCH_SFA_DEFINE_ERROR(EmptySpectrum)
SKETCH_SFA_DEFINE_ERROR(BudgetExceeded)
SKETCH_SFA_DEFINE_ERROR(RejectionStall)

#undef SKETCH_SFA_DEFINE_ERROR

/// Raised when a matrix that must have full column rank does not. Carries the
/// estimate of the smallest singular value.
class RankDeficient : public Error {
 public:
  RankDeficient(const std::string& message, double theta, std::string step = {})
      : Error(ErrorKind::RankDeficient, message, std::move(step)), theta_(theta) {}
  double theta() const noexcept { return theta_; }

 private:
  double theta_;
};

/// Rethrows `error` as the same concrete type with `step` attached.
[[noreturn]] void rethrow_with_step(const Error& error, const std::string& step);

}  // namespace sketch_sfa
