#pragma once

#include "pdeetc/lmi.hpp"
#include "pdeetc/sdp.hpp"

#include <optional>
#include <string>
#include <vector>

namespace pdeetc {

struct SlackEntry {
  std::string name;
  double value = 0.0;  // positive = satisfied (distance past the margin boundary)
};

struct ControllerCertificate {
  SynthesisParams params;  // the (beta1, Lambda) actually used
  Mat P, U, Q1, Q2, M1, M2, M3, N, L, Omega;
  Mat Xi1, Xi2;
  Mat r;  // N = r P11
  Mat K;  // n_u x n_y, u = -K y
  double rho = 0.0;  // attenuation level squared; 0 when not an H-infinity certificate
  std::vector<SlackEntry> slack;
  int solver_steps = 0;
  std::string source;
  std::vector<std::string> log;

  int m() const { return static_cast<int>(U.rows()); }
  Mat P11() const { return P.topLeftCorner(m(), m()); }
  double gamma() const { return std::sqrt(rho); }
  PhiVariables variables() const;
};

struct SynthesisOptions {
  SdpOptions sdp;
  bool grid_search = true;
  std::vector<double> beta1_grid{1, 3, 10, 30, 100, 300, 1000, 3000};
  std::vector<double> lambda_grid{1, 3, 10, 30, 100, 300, 1000, 3000};
  PhiVariant variant = PhiVariant::Stability;
  /// Scalar N = r P11 ratios tried when the step-2 ratio fails in step 3.
  std::vector<double> ratio_grid{0.05, 0.2, 0.5, 1.0};
};

/// Algorithm 2: relaxed LMIs with N free, fix N = r P11, resolve, K = B2^{-1} P11^{-1} Xi2,
/// then check the exact inequalities. Throws Infeasible (all grid points fail),
/// CertificateRejected (exact check fails), Unsupported (non-square B2).
ControllerCertificate synthesize_gain(const SynthesisParams& params, const SynthesisOptions& opt = {});

/// Searches the remaining variables for a fixed gain K (the inequalities are
/// affine once K is fixed). Same errors as synthesize_gain.
ControllerCertificate certify_gain(const SynthesisParams& params, const Mat& K, const SynthesisOptions& opt = {});

struct GammaResult {
  ControllerCertificate cert;
  double gamma_opt = 0.0;
  std::vector<double> rho_history;  // accepted values, non-increasing
  int rejected = 0;
  bool stalled = false;
};

/// Algorithm 3 alternation on rho = gamma^2.
GammaResult optimize_gamma(const SynthesisParams& params, double omega_rho, const SynthesisOptions& opt = {},
                           int max_iterations = 20);

enum class VerifyMode { Stability, Hinf, NoDisturbance };
VerifyMode parse_verify_mode(const std::string& s);
const char* to_string(VerifyMode m);

struct VerifyCheck {
  std::string name;
  double eigenvalue = 0.0;  // max eigenvalue for "< 0" checks, min for "> 0"
  bool negative = true;     // which side is required
  bool pass = false;
};

struct VerifyReport {
  std::vector<VerifyCheck> checks;
  bool pass = false;
  /// |lambda_max| of each exact corner matrix, in corner order.
  std::vector<double> corner_max;
  std::string summary() const;
};

VerifyReport verify_certificate(const ControllerCertificate& cert, VerifyMode mode);
VerifyReport verify_certificate(const ControllerCertificate& cert, const SynthesisParams& params, VerifyMode mode);

/// Ultimate bound sqrt(2/alpha6) D1 on |xi_s| from a verified certificate.
double ultimate_bound(const ControllerCertificate& cert, double D1);

void write_certificate(const ControllerCertificate& cert, const std::string& path);
ControllerCertificate read_certificate(const std::string& path);

}  // namespace pdeetc
