#include "sedlqr/error.h"

namespace sedlqr {

std::string_view ErrorName(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidTopology: return "invalid-topology";
    case ErrorKind::kInvalidEdge: return "invalid-edge";
    case ErrorKind::kInvalidIndex: return "invalid-index";
    case ErrorKind::kShapeError: return "shape-error";
    case ErrorKind::kNumericError: return "numeric-error";
    case ErrorKind::kDegenerateCertificate: return "degenerate-certificate";
    case ErrorKind::kInvalidInput: return "invalid-input";
    case ErrorKind::kInvalidProblem: return "invalid-problem";
    case ErrorKind::kRiccatiFailure: return "riccati-failure";
    case ErrorKind::kUnstableInput: return "unstable-input";
    case ErrorKind::kUnstableController: return "unstable-controller";
    case ErrorKind::kCertificateUnavailable: return "certificate-unavailable";
    case ErrorKind::kSingularM: return "singular-M";
    case ErrorKind::kThresholdUndefined: return "threshold-undefined";
    case ErrorKind::kDivergenceDetected: return "divergence-detected";
    case ErrorKind::kIoError: return "io-error";
    case ErrorKind::kUsageError: return "usage-error";
  }
  return "unknown-error";
}

}  // namespace sedlqr
