#pragma once

#include "pdeetc/affine.hpp"
#include "pdeetc/mnn.hpp"

#include <string>
#include <vector>

namespace pdeetc {

/// Everything the matrix inequalities depend on except the decision variables.
struct SynthesisParams {
  Mat A, B2, B1, C;     // slow model
  Mat W, V;             // identified network
  Vec q, r;             // activation parameters (only used to evaluate V along trajectories)
  double delta = 0.0;   // residual bound |f_s - f_nn| <= delta |xi|
  SectorBounds sector;
  double h = 0.11;      // waiting time
  double epsilon = 0.01;
  Mat Lambda;           // n_y x n_y trigger weight
  double alpha = 0.1;
  double beta1 = 1.0;
  double beta2 = 1.11;
  double D1 = 0.1;
  double margin = 1e-6;

  int m() const { return static_cast<int>(A.rows()); }
  int n_u() const { return static_cast<int>(B2.cols()); }
  int n_d() const { return static_cast<int>(B1.cols()); }
  int n_y() const { return static_cast<int>(C.rows()); }
  int n_h() const { return static_cast<int>(W.cols()); }
  Mat zeta1() const { return sector.G_min() * V; }
  Mat zeta2() const { return sector.G_max() * V; }
  Mat zeta3() const { return (sector.G_min() + sector.G_max()) * V; }
  Mat zeta4() const { return sector.G() * V; }
  void validate() const;
};

/// Decision variables as affine maps; for the exact (bilinear) inequalities every
/// entry is a constant matrix.
struct PhiVariables {
  AffineMat P11, P12, P22, U, Q1, Q2, M1, M2, M3, N, L, Omega;
  AffineMat Xi1;  // N B2 K
  AffineMat Xi2;  // P11 B2 K
  AffineMat rho;  // 1x1, attenuation level squared (H-infinity only)
};

enum class PhiVariant { Stability, NoDisturbance, Hinf };

/// Row blocks of the assembled matrices, in order.
enum class PhiBlock { Xi, XiDot, XiDelayed, TriggerError, Hidden, Residual, DelayIntegral, Disturbance, Schur };

struct AssembledPhi {
  AffineMat matrix;
  std::vector<std::pair<PhiBlock, Eigen::Index>> blocks;  // block kind and size
};

/// 2m x 2m positivity condition on P, Q1, Q2.
AffineMat assemble_xi_tilde(const AffineMat& P11, const AffineMat& P12, const AffineMat& P22, const AffineMat& Q1,
                            const AffineMat& Q2, double h);

/// Corner k in 1..4: (switching branch active, tau -> 0), (active, tau -> h),
/// (inactive, 0), (inactive, h). Hinf corners are numbered 5..8 in the same order.
/// Exact matrices; all variables must be constant.
AssembledPhi assemble_bmi_phi(int which, const SynthesisParams& p, const PhiVariables& v,
                              PhiVariant variant = PhiVariant::Stability);
/// Schur-complement relaxation, affine in the variables for fixed beta1, Lambda.
AssembledPhi assemble_lmi_phi_tilde(int which, const SynthesisParams& p, const PhiVariables& v,
                                    PhiVariant variant = PhiVariant::Stability);
/// Disturbance-free exact matrices.
AssembledPhi assemble_corollary1(int which, const SynthesisParams& p, const PhiVariables& v);
/// H-infinity corners, which in 5..8; `lmi` selects the relaxed form.
AssembledPhi assemble_hinf(int which, const SynthesisParams& p, const PhiVariables& v, bool lmi);

/// Numeric variables for the exact inequalities from matrices and a gain K.
PhiVariables constant_variables(const Mat& P, const Mat& U, const Mat& Q1, const Mat& Q2, const Mat& M1,
                                const Mat& M2, const Mat& M3, const Mat& N, const Mat& L, const Mat& Omega,
                                const Mat& B2, const Mat& K, double rho = 0.0);

}  // namespace pdeetc
