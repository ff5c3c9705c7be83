#pragma once

#include <stdexcept>
#include <string>

namespace qcoord {

enum class ErrorKind {
  Structural,    // shape/dimension mismatch between values
  Precondition,  // operation called outside its contract
  Validation,    // a numeric invariant check failed
  Construction,  // a builder's input admits no valid construction
  Parse,         // malformed input document
  Usage,         // bad command or argument
};

inline const char* error_kind_name(ErrorKind k) {
  switch (k) {
    case ErrorKind::Structural: return "structural";
    case ErrorKind::Precondition: return "precondition";
    case ErrorKind::Validation: return "validation";
    case ErrorKind::Construction: return "construction";
    case ErrorKind::Parse: return "parse";
    case ErrorKind::Usage: return "usage";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

// Carries which check failed and by how much, so callers and tests can
// distinguish e.g. a trace failure from a positivity failure.
class ValidationError : public Error {
 public:
  ValidationError(std::string check, double magnitude, const std::string& message)
      : Error(ErrorKind::Validation, message),
        check_(std::move(check)),
        magnitude_(magnitude) {}

  const std::string& check() const { return check_; }
  double magnitude() const { return magnitude_; }

 private:
  std::string check_;
  double magnitude_;
};

struct StructuralError : Error {
  explicit StructuralError(const std::string& message)
      : Error(ErrorKind::Structural, message) {}
};

struct PreconditionError : Error {
  explicit PreconditionError(const std::string& message)
      : Error(ErrorKind::Precondition, message) {}
};

struct ConstructionError : Error {
  explicit ConstructionError(const std::string& message)
      : Error(ErrorKind::Construction, message) {}
};

struct ParseError : Error {
  explicit ParseError(const std::string& message)
      : Error(ErrorKind::Parse, message) {}
};

struct UsageError : Error {
  explicit UsageError(const std::string& message)
      : Error(ErrorKind::Usage, message) {}
};

}  // namespace qcoord
