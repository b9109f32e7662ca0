#include "pdeetc/galerkin.hpp"

#include "pdeetc/error.hpp"
#include "pdeetc/fd_operator.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <numeric>

namespace pdeetc {

void SturmLiouvilleSpec::validate() const {
  if (!(domain.lo < domain.hi)) throw Error(ErrorKind::InvalidArgument, "domain must satisfy lo < hi");
  if (!z2) throw Error(ErrorKind::InvalidArgument, "diffusion profile z2 is required");
  for (int i = 0; i <= 256; ++i) {
    const double p = domain.lo + domain.length() * i / 256.0;
    if (!(z2(p) > 0.0)) throw Error(ErrorKind::InvalidArgument, "z2 must be positive on the domain");
  }
  for (const auto* bc : {&left, &right}) {
    if (bc->h1 == 0.0 && bc->h2 == 0.0)
      throw Error(ErrorKind::InvalidArgument, "boundary coefficients (h1, h2) must not both vanish");
  }
}

Vec ModalBasis::phi_row(double p, int count) const {
  Vec row(count);
  for (int j = 0; j < count; ++j) row[j] = evaluator(j, p);
  return row;
}

Mat ModalBasis::slow_matrix(const Vec& locations) const {
  Mat out(locations.size(), m);
  for (Eigen::Index i = 0; i < locations.size(); ++i) out.row(i) = phi_row(locations[i], m).transpose();
  return out;
}

double ModalBasis::field(const Vec& xi, double p) const {
  double s = 0.0;
  for (Eigen::Index j = 0; j < xi.size(); ++j) s += xi[j] * evaluator(static_cast<int>(j), p);
  return s;
}

namespace {

void finish_basis(ModalBasis& basis) {
  const SpectralGap gap = spectral_gap(basis, basis.m);
  basis.separable = gap.separable;
}

}  // namespace

ModalBasis analytic_dirichlet_basis(double diffusion, Interval domain, int m, int panels, int n_modes) {
  if (m < 1) throw Error(ErrorKind::InvalidArgument, "m must be >= 1");
  if (!(diffusion > 0.0)) throw Error(ErrorKind::InvalidArgument, "diffusion must be positive");
  const int count = std::max(n_modes, m + 1);
  const double len = domain.length();
  ModalBasis b;
  b.m = m;
  b.domain = domain;
  b.eigenvalues.resize(count);
  for (int j = 0; j < count; ++j) {
    const double k = (j + 1) * std::numbers::pi / len;
    b.eigenvalues[j] = -diffusion * k * k;
  }
  const double scale = std::sqrt(2.0 / len);
  const double lo = domain.lo;
  b.evaluator = [scale, lo, len](int j, double p) {
    return scale * std::sin((j + 1) * std::numbers::pi * (p - lo) / len);
  };
  b.quadrature = composite_gauss_legendre(domain, panels, 8);
  b.weight_nodes = Vec::Ones(b.quadrature.nodes.size());
  b.phi_nodes.resize(b.quadrature.nodes.size(), count);
  for (Eigen::Index i = 0; i < b.quadrature.nodes.size(); ++i)
    for (int j = 0; j < count; ++j) b.phi_nodes(i, j) = b.evaluator(j, b.quadrature.nodes[i]);
  finish_basis(b);
  return b;
}

ModalBasis analytic_dirichlet_basis(const SturmLiouvilleSpec& spec, int m, int panels, int n_modes) {
  spec.validate();
  if (!spec.left.dirichlet() || !spec.right.dirichlet())
    throw Error(ErrorKind::UnsupportedBoundary, "analytic basis requires Dirichlet ends");
  if (spec.has_advection())
    throw Error(ErrorKind::Unsupported, "analytic basis requires z1 = 0");
  const double d0 = spec.z2(spec.domain.lo);
  for (int i = 1; i <= 64; ++i) {
    const double p = spec.domain.lo + spec.domain.length() * i / 64.0;
    if (std::abs(spec.z2(p) - d0) > 1e-12 * d0)
      throw Error(ErrorKind::Unsupported, "analytic basis requires constant diffusion");
  }
  return analytic_dirichlet_basis(d0, spec.domain, m, panels, n_modes);
}

ModalBasis eigensolve_sturm_liouville(const SturmLiouvilleSpec& spec, int grid_n, int m, int n_modes) {
  if (m < 1) throw Error(ErrorKind::InvalidArgument, "m must be >= 1");
  if (grid_n < 10 * m)
    throw Error(ErrorKind::Resolution, "grid_n must be at least 10*m (got " + std::to_string(grid_n) + ")");
  const FdOperator op = build_fd_operator(spec, grid_n);
  const int n = op.unknowns();
  const int count = std::min(n, std::max(n_modes, m + 1));

  // symmetric form S = M^{-1/2} K M^{-1/2}
  std::vector<double> d(n), e(std::max(n, 1), 0.0);
  for (int i = 0; i < n; ++i) d[i] = op.diag[i] / op.mass[i];
  for (int i = 0; i + 1 < n; ++i) e[i] = op.off[i] / std::sqrt(op.mass[i] * op.mass[i + 1]);
  std::vector<double> w(n), z(static_cast<size_t>(n) * count);
  std::vector<lapack_int> support(2 * static_cast<size_t>(count));
  lapack_int found = 0;
  const lapack_int info = LAPACKE_dstevr(LAPACK_COL_MAJOR, 'V', 'I', n, d.data(), e.data(), 0.0, 0.0,
                                         n - count + 1, n, 0.0, &found, w.data(), z.data(), n,
                                         support.data());
  if (info != 0 || found != count)
    throw Error(ErrorKind::NumericalFailure, "tridiagonal eigensolve failed (info=" + std::to_string(info) + ")");

  // assemble full-grid eigenvectors, M-normalised, then order
  const int grid_total = static_cast<int>(op.grid.size());
  Mat vecs = Mat::Zero(grid_total, count);
  std::vector<int> sign_changes(count, 0);
  for (int c = 0; c < count; ++c) {
    for (int i = 0; i < n; ++i) vecs(op.first + i, c) = z[static_cast<size_t>(c) * n + i] / std::sqrt(op.mass[i]);
    const double peak = vecs.col(c).cwiseAbs().maxCoeff();
    double first_sig = 0.0;
    double prev = 0.0;
    for (int i = 0; i < grid_total; ++i) {
      const double v = vecs(i, c);
      if (std::abs(v) <= 1e-8 * peak) continue;
      if (first_sig == 0.0) first_sig = v;
      if (prev != 0.0 && (v > 0) != (prev > 0)) ++sign_changes[c];
      prev = v;
    }
    if (first_sig < 0.0) vecs.col(c) *= -1.0;
  }
  std::vector<int> order(count);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    const double scale = std::max({std::abs(w[a]), std::abs(w[b]), 1.0});
    if (std::abs(w[a] - w[b]) > 1e-12 * scale) return w[a] > w[b];
    return sign_changes[a] < sign_changes[b];
  });

  ModalBasis b;
  b.m = m;
  b.domain = spec.domain;
  b.eigenvalues.resize(count);
  auto values = std::make_shared<Mat>(grid_total, count);
  for (int c = 0; c < count; ++c) {
    b.eigenvalues[c] = w[order[c]];
    values->col(c) = vecs.col(order[c]);
  }
  if (count < m + 1) throw Error(ErrorKind::Resolution, "not enough unknowns for m + 1 modes");
  auto grid = std::make_shared<Vec>(op.grid);
  b.evaluator = [grid, values](int j, double p) {
    return interpolate_linear(*grid, values->col(j), p);
  };
  b.quadrature = QuadratureGrid{op.grid, op.cell};
  b.weight_nodes = op.weight;
  b.phi_nodes = *values;
  if (spec.has_advection()) {
    SturmLiouvilleSpec copy = spec;
    b.weight = [copy](double p) {
      Vec pt(1);
      pt[0] = p;
      return sturm_liouville_weight(copy, pt)[0];
    };
  }

  // residual of the eigenpairs against the direct (non-symmetrised) central-difference operator
  const double dx = spec.domain.length() / (grid_total - 1);
  double worst = 0.0;
  for (int c = 0; c < count; ++c) {
    const double lam = b.eigenvalues[c];
    const auto phi = values->col(c);
    const double peak = phi.cwiseAbs().maxCoeff();
    for (int i = 1; i + 1 < grid_total; ++i) {
      const double p = op.grid[i];
      const double zm = spec.z2(p - 0.5 * dx), zp = spec.z2(p + 0.5 * dx);
      double a = (zp * (phi[i + 1] - phi[i]) - zm * (phi[i] - phi[i - 1])) / (dx * dx);
      if (spec.has_advection()) a += spec.z1(p) * (phi[i + 1] - phi[i - 1]) / (2.0 * dx);
      worst = std::max(worst, std::abs(a - lam * phi[i]) / (std::max(std::abs(lam), 1.0) * peak));
    }
  }
  b.discretization_residual = worst;
  b.non_self_adjoint_warning = worst > 1e-3;
  finish_basis(b);
  return b;
}

namespace {

Vec project_sampled(const Vec& samples, const ModalBasis& basis, const std::vector<int>& modes) {
  const Vec wq = basis.quadrature.weights.cwiseProduct(basis.weight_nodes).cwiseProduct(samples);
  Vec out(modes.size());
  for (size_t k = 0; k < modes.size(); ++k) {
    const int j = modes[k];
    if (j < 0 || j >= basis.mode_count()) throw Error(ErrorKind::InvalidArgument, "mode index out of range");
    out[static_cast<Eigen::Index>(k)] = basis.phi_nodes.col(j).dot(wq);
  }
  return out;
}

std::vector<int> slow_modes(const ModalBasis& basis) {
  std::vector<int> modes(basis.m);
  std::iota(modes.begin(), modes.end(), 0);
  return modes;
}

}  // namespace

Vec project(const Profile& profile, const ModalBasis& basis, const std::vector<int>& modes) {
  return project_sampled(basis.quadrature.sample(profile), basis, modes);
}

Vec project(const TabulatedProfile& profile, const ModalBasis& basis, const std::vector<int>& modes,
            bool allow_resample) {
  if (profile.grid.size() != profile.values.size())
    throw Error(ErrorKind::InvalidArgument, "tabulated grid and values differ in length");
  const Vec& nodes = basis.quadrature.nodes;
  const bool same = profile.grid.size() == nodes.size() &&
                    (profile.grid - nodes).cwiseAbs().maxCoeff() <= 1e-12 * (1.0 + basis.domain.length());
  if (same) return project_sampled(profile.values, basis, modes);
  if (!allow_resample)
    throw Error(ErrorKind::GridMismatch, "tabulated profile is not on the quadrature grid; enable resampling");
  Vec resampled(nodes.size());
  for (Eigen::Index i = 0; i < nodes.size(); ++i)
    resampled[i] = interpolate_linear(profile.grid, profile.values, nodes[i]);
  return project_sampled(resampled, basis, modes);
}

Vec project_slow(const Profile& profile, const ModalBasis& basis) {
  return project(profile, basis, slow_modes(basis));
}

Mat project_columns(const std::vector<Profile>& profiles, const ModalBasis& basis) {
  Mat out(basis.m, static_cast<Eigen::Index>(profiles.size()));
  for (size_t c = 0; c < profiles.size(); ++c) out.col(static_cast<Eigen::Index>(c)) = project_slow(profiles[c], basis);
  return out;
}

SpectralGap spectral_gap(const ModalBasis& basis, int m) {
  if (m < 1 || basis.mode_count() < m + 1)
    throw Error(ErrorKind::InvalidArgument, "basis needs at least m + 1 eigenvalues");
  const Vec& lam = basis.eigenvalues;
  int lead = -1;
  for (int j = 0; j < basis.mode_count(); ++j) {
    if (lam[j] != 0.0) {
      lead = j;
      break;
    }
  }
  if (lead < 0) throw Error(ErrorKind::DegenerateSpectrum, "all eigenvalues are zero");
  SpectralGap gap;
  const double tail = lam[m];
  gap.epsilon = tail == 0.0 ? std::numeric_limits<double>::infinity() : std::abs(lam[lead]) / std::abs(tail);
  gap.separable = tail < 0.0 && gap.epsilon < 1.0;
  return gap;
}

Vec reconstruct_slow_state(const Vec& samples, const ModalBasis& basis, const Vec& locations) {
  const int m = basis.m;
  if (locations.size() != samples.size())
    throw Error(ErrorKind::InvalidArgument, "samples and locations differ in length");
  if (locations.size() < m) throw Error(ErrorKind::InvalidArgument, "need at least m sample locations");
  const Mat phi = basis.slow_matrix(locations);
  Eigen::JacobiSVD<Mat> svd(phi);
  const Vec sv = svd.singularValues();
  const double cond = sv[sv.size() - 1] > 0.0 ? sv[0] / sv[sv.size() - 1] : std::numeric_limits<double>::infinity();
  if (!(cond <= 1e12))
    throw Error(ErrorKind::SingularLocations, "eigenfunction matrix at the sample locations is singular");
  if (locations.size() == m) return phi.partialPivLu().solve(samples);
  return phi.colPivHouseholderQr().solve(samples);
}

void SlowSystem::validate() const {
  const Eigen::Index n = A.rows();
  if (A.cols() != n || B2.rows() != n || B1.rows() != n || C.cols() != n)
    throw Error(ErrorKind::InvalidArgument, "slow system dimensions are inconsistent");
}

SlowSystem assemble_slow_system(BasisPtr basis, const std::vector<Profile>& b2,
                                const std::vector<Profile>& b1, const std::vector<Profile>& cbar) {
  if (!basis) throw Error(ErrorKind::InvalidArgument, "null basis");
  if (!basis->separable) throw Error(ErrorKind::InvalidArgument, "basis is not slow/fast separable");
  SlowSystem s;
  const int m = basis->m;
  s.A = Mat::Zero(m, m);
  for (int j = 0; j < m; ++j) s.A(j, j) = basis->eigenvalues[j];
  s.B2 = project_columns(b2, *basis);
  s.B1 = project_columns(b1, *basis);
  s.C = project_columns(cbar, *basis).transpose();
  s.basis = std::move(basis);
  return s;
}

void write_basis_csv(const ModalBasis& basis, const std::string& path, int samples) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path);
  out << std::setprecision(17) << "p";
  for (int j = 0; j < basis.m; ++j) out << ",phi_" << (j + 1);
  out << '\n';
  for (int i = 0; i < samples; ++i) {
    const double p = basis.domain.lo + basis.domain.length() * i / (samples - 1);
    out << p;
    for (int j = 0; j < basis.m; ++j) out << ',' << basis.phi(j, p);
    out << '\n';
  }
}

}  // namespace pdeetc
