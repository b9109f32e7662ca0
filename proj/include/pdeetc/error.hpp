#pragma once

#include <stdexcept>
#include <string>

namespace pdeetc {

enum class ErrorKind {
  InvalidArgument,
  UnsupportedBoundary,
  Resolution,
  SingularLocations,
  DegenerateSpectrum,
  GridMismatch,
  Divergence,
  Solver,
  TrainingStalled,
  Infeasible,
  NumericalFailure,
  CertificateRejected,
  UndefinedRatio,
  Unsupported,
  Config,
  Io,
  Assertion,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace pdeetc
