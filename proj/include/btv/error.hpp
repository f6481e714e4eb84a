#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace btv {

enum class ErrorCategory { Validation, Lookup, Domain, Precondition, Io, Numerical };

std::string_view category_name(ErrorCategory category) noexcept;

/// Base of every error thrown by the library. The category drives CLI exit codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& message)
      : std::runtime_error(message), category_(category) {}

  ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& m) : Error(ErrorCategory::Validation, m) {}
};

class LookupError : public Error {
 public:
  explicit LookupError(const std::string& m) : Error(ErrorCategory::Lookup, m) {}
};

class DomainError : public Error {
 public:
  explicit DomainError(const std::string& m) : Error(ErrorCategory::Domain, m) {}
};

class PreconditionError : public Error {
 public:
  explicit PreconditionError(const std::string& m) : Error(ErrorCategory::Precondition, m) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& m) : Error(ErrorCategory::Io, m) {}
};

class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& m) : Error(ErrorCategory::Numerical, m) {}
};

}  // namespace btv
