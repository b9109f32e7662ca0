#pragma once

#include "pdeetc/quadrature.hpp"

#include <memory>
#include <string>
#include <vector>

namespace pdeetc {

/// h1 * xi + h2 * dxi/dp = 0 at one end of the domain.
struct BoundaryCondition {
  double h1 = 1.0;
  double h2 = 0.0;
  bool dirichlet() const { return h2 == 0.0; }
};

/// Spatial operator  A xi = z1 xi_p + (z2 xi_p)_p  with Robin/Dirichlet ends.
/// An empty z1 means no advection term.
struct SturmLiouvilleSpec {
  Interval domain{0.0, 1.0};
  Profile z1;
  Profile z2;
  BoundaryCondition left;
  BoundaryCondition right;

  void validate() const;
  bool has_advection() const { return static_cast<bool>(z1); }
};

/// Eigenpairs of the spatial operator together with the quadrature used for
/// every inner product. Eigenvalues are stored in descending order; the first
/// `m` are the slow modes.
struct ModalBasis {
  int m = 0;
  Interval domain;
  Vec eigenvalues;               // size n_modes >= m + 1
  QuadratureGrid quadrature;
  Mat phi_nodes;                 // quadrature.nodes.size() x n_modes
  Vec weight_nodes;              // Sturm-Liouville weight at the nodes (1 when z1 = 0)
  std::function<double(int, double)> evaluator;  // (j zero-based, p)
  Profile weight;                // weight function w(p); empty means w = 1
  bool separable = false;
  bool non_self_adjoint_warning = false;
  double discretization_residual = 0.0;

  int mode_count() const { return static_cast<int>(eigenvalues.size()); }
  double tail_eigenvalue() const { return eigenvalues[m]; }
  double phi(int j, double p) const { return evaluator(j, p); }
  /// Row [phi_0(p), ..., phi_{count-1}(p)].
  Vec phi_row(double p, int count) const;
  /// Slow-mode values at the given locations (k x m).
  Mat slow_matrix(const Vec& locations) const;
  /// Field sum_j xi_j phi_j(p) for the first xi.size() modes.
  double field(const Vec& xi, double p) const;
};

using BasisPtr = std::shared_ptr<const ModalBasis>;

/// Sine modes of the constant-coefficient Dirichlet Laplacian.
/// `panels` composite Gauss-Legendre panels of 8 nodes; `n_modes` = 0 keeps m + 1.
ModalBasis analytic_dirichlet_basis(double diffusion, Interval domain, int m,
                                    int panels = 64, int n_modes = 0);
/// Same, taking the operator description; rejects non-Dirichlet ends,
/// advection and non-constant diffusion.
ModalBasis analytic_dirichlet_basis(const SturmLiouvilleSpec& spec, int m, int panels = 64,
                                    int n_modes = 0);

/// Finite-difference eigensolve on `grid_n` uniform nodes (boundaries included).
ModalBasis eigensolve_sturm_liouville(const SturmLiouvilleSpec& spec, int grid_n, int m,
                                      int n_modes = 0);

struct TabulatedProfile {
  Vec grid;
  Vec values;
};

/// Entry j = <phi_{modes[j]}, profile> (weighted when the basis carries a weight).
Vec project(const Profile& profile, const ModalBasis& basis, const std::vector<int>& modes);
Vec project(const TabulatedProfile& profile, const ModalBasis& basis,
            const std::vector<int>& modes, bool allow_resample = false);
/// Projection onto the slow modes 0..m-1.
Vec project_slow(const Profile& profile, const ModalBasis& basis);
/// Each profile becomes one column of the result (m x profiles.size()).
Mat project_columns(const std::vector<Profile>& profiles, const ModalBasis& basis);

struct SpectralGap {
  double epsilon = 0.0;
  bool separable = false;
};

SpectralGap spectral_gap(const ModalBasis& basis, int m);

/// Least-squares slow-state estimate from point samples of the field.
Vec reconstruct_slow_state(const Vec& samples, const ModalBasis& basis, const Vec& locations);

struct SlowSystem {
  Mat A;   // m x m diagonal
  Mat B2;  // m x n_u
  Mat B1;  // m x n_d
  Mat C;   // n_y x m
  BasisPtr basis;

  int m() const { return static_cast<int>(A.rows()); }
  int n_u() const { return static_cast<int>(B2.cols()); }
  int n_d() const { return static_cast<int>(B1.cols()); }
  int n_y() const { return static_cast<int>(C.rows()); }
  void validate() const;
};

SlowSystem assemble_slow_system(BasisPtr basis, const std::vector<Profile>& b2,
                                const std::vector<Profile>& b1, const std::vector<Profile>& cbar);

/// CSV with columns p, phi_1..phi_m and a leading comment row of eigenvalues.
void write_basis_csv(const ModalBasis& basis, const std::string& path, int samples = 201);

}  // namespace pdeetc
