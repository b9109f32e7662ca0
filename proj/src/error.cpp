#include "pdeetc/error.hpp"

namespace pdeetc {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "invalid-argument";
    case ErrorKind::UnsupportedBoundary: return "unsupported-boundary";
    case ErrorKind::Resolution: return "resolution";
    case ErrorKind::SingularLocations: return "singular-locations";
    case ErrorKind::DegenerateSpectrum: return "degenerate-spectrum";
    case ErrorKind::GridMismatch: return "grid-mismatch";
    case ErrorKind::Divergence: return "divergence";
    case ErrorKind::Solver: return "solver";
    case ErrorKind::TrainingStalled: return "training-stalled";
    case ErrorKind::Infeasible: return "infeasible";
    case ErrorKind::NumericalFailure: return "numerical-failure";
    case ErrorKind::CertificateRejected: return "certificate-rejected";
    case ErrorKind::UndefinedRatio: return "undefined-ratio";
    case ErrorKind::Unsupported: return "unsupported";
    case ErrorKind::Config: return "config";
    case ErrorKind::Io: return "io";
    case ErrorKind::Assertion: return "assertion";
  }
  return "unknown";
}

}  // namespace pdeetc
