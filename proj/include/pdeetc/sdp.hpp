#pragma once

#include "pdeetc/affine.hpp"

#include <string>
#include <vector>

namespace pdeetc {

enum class Sense { NegativeDefinite, PositiveDefinite };

/// F(x) < -margin I (NegativeDefinite) or F(x) > margin I (PositiveDefinite).
struct LmiConstraint {
  std::string name;
  AffineMat F;
  Sense sense = Sense::NegativeDefinite;
};

struct SdpOptions {
  double margin = 1e-6;       // strictness margin mu
  double radius = 1e4;        // ||x|| < radius keeps the feasible set bounded
  double gap_tol = 1e-7;      // barrier duality-gap proxy
  double barrier_factor = 0.2;
  int max_newton = 100;       // per centering step
  double max_condition = 1e14;
  /// Feasibility problems: keep minimising the phase-1 slack after it turns
  /// negative so the returned point is well inside the feasible set.
  bool center = true;
  /// ...but stop once the phase-1 slack reaches -center_target; homogeneous
  /// problems would otherwise drift to the norm ball.
  double center_target = 1e-3;
};

enum class SdpStatus { Feasible, Optimal, Infeasible, NumericalFailure };
const char* to_string(SdpStatus s);

struct SdpResult {
  SdpStatus status = SdpStatus::NumericalFailure;
  Vec x;
  double objective = 0.0;
  double phase1_value = 0.0;          // min s with F_k + s I feasible (negative = strictly feasible)
  std::vector<std::string> names;
  std::vector<double> slack;          // per constraint, positive = satisfied
  std::string binding;                // constraint with the smallest slack
  int newton_steps = 0;
  std::string message;

  bool ok() const { return status == SdpStatus::Feasible || status == SdpStatus::Optimal; }
};

/// Log-det barrier interior point: phase 1 minimises s subject to
/// F_k(x) + s I in the required cone, phase 2 (when `objective` is non-empty)
/// minimises objective . x from the strictly feasible phase-1 point.
SdpResult sdp_solve(int n_vars, const std::vector<LmiConstraint>& constraints, const Vec& objective = Vec(),
                    const SdpOptions& options = SdpOptions());

/// Eigenvalue slack of every constraint at x (positive = satisfied).
std::vector<double> constraint_slacks(const std::vector<LmiConstraint>& constraints, const Vec& x);

}  // namespace pdeetc
