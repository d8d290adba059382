#pragma once

#include <stdexcept>
#include <string>

namespace jflow {

/// Failure categories. The numeric values double as CLI exit statuses.
enum class ErrorCategory : int {
  Usage = 1,
  Validation = 2,
  Hypothesis = 3,
  Numerical = 4,
  NonConvergence = 5,
};

const char* category_name(ErrorCategory c) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& what)
      : std::runtime_error(what), category_(category) {}

  ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

/// A pointwise matrix was required to be positive definite and was not.
class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what)
      : Error(ErrorCategory::Numerical, what) {}
};

class UsageError : public Error {
 public:
  explicit UsageError(const std::string& what)
      : Error(ErrorCategory::Usage, what) {}
};

class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& what)
      : Error(ErrorCategory::Validation, what) {}
};

/// The background data violates the positivity hypothesis n c chi0 - omega > 0
/// (or another SurfaceModel invariant that no numerical setting can repair).
class HypothesisError : public Error {
 public:
  explicit HypothesisError(const std::string& what)
      : Error(ErrorCategory::Hypothesis, what) {}
};

class NonConvergenceError : public Error {
 public:
  explicit NonConvergenceError(const std::string& what)
      : Error(ErrorCategory::NonConvergence, what) {}
};

}  // namespace jflow
