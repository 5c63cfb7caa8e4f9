#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sedlqr {

enum class ErrorKind {
  kInvalidTopology,
  kInvalidEdge,
  kInvalidIndex,
  kShapeError,
  kNumericError,
  kDegenerateCertificate,
  kInvalidInput,
  kInvalidProblem,
  kRiccatiFailure,
  kUnstableInput,
  kUnstableController,
  kCertificateUnavailable,
  kSingularM,
  kThresholdUndefined,
  kDivergenceDetected,
  kIoError,
  kUsageError,
};

/// Stable, hyphenated name of an error kind ("riccati-failure", ...). The CLI
/// prints these names on failure.
std::string_view ErrorName(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(ErrorName(kind)) + ": " + message),
        kind_(kind) {}

  ErrorKind kind() const { return kind_; }
  std::string_view name() const { return ErrorName(kind_); }

 private:
  ErrorKind kind_;
};

}  // namespace sedlqr
