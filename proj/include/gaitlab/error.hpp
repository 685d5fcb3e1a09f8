#pragma once

#include <stdexcept>
#include <string>

namespace gaitlab {

/// Broad failure class; the CLI maps each one onto a process exit code.
enum class ErrorKind {
  validation,  ///< malformed or out-of-contract input
  infeasible,  ///< a muscle cannot produce the requested force
  model,       ///< model file missing, corrupt, or incompatible
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

struct ValidationError : Error {
  explicit ValidationError(const std::string& what) : Error(ErrorKind::validation, what) {}
};

/// Input carries a field path ("samples[3].t") for schema diagnostics.
struct SchemaError : ValidationError {
  SchemaError(std::string field_path, const std::string& what)
      : ValidationError(field_path + ": " + what), path(std::move(field_path)), detail(what) {}
  std::string path;
  std::string detail;  ///< message without the path prefix
};

struct SignalTooShortError : ValidationError {
  using ValidationError::ValidationError;
};

struct NoStepsError : ValidationError {
  using ValidationError::ValidationError;
};

struct DegenerateSegmentError : ValidationError {
  using ValidationError::ValidationError;
};

struct ShapeError : ValidationError {
  using ValidationError::ValidationError;
};

struct DomainError : ValidationError {
  using ValidationError::ValidationError;
};

struct SingularGeometryError : ValidationError {
  using ValidationError::ValidationError;
};

struct InvalidGaitError : ValidationError {
  using ValidationError::ValidationError;
};

struct InfeasibleError : Error {
  explicit InfeasibleError(const std::string& what) : Error(ErrorKind::infeasible, what) {}
};

struct ModelError : Error {
  explicit ModelError(const std::string& what) : Error(ErrorKind::model, what) {}
};

}  // namespace gaitlab
