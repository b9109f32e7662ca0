#include "pdeetc/fd_operator.hpp"

#include "pdeetc/error.hpp"

#include <cmath>

namespace pdeetc {

namespace {

// 8-point Gauss-Legendre integral of z1/z2 over [a, b].
double log_weight_increment(const SturmLiouvilleSpec& spec, double a, double b) {
  static const QuadratureGrid ref = gauss_legendre(8);
  double s = 0.0;
  for (Eigen::Index i = 0; i < ref.nodes.size(); ++i) {
    const double p = a + 0.5 * (b - a) * (ref.nodes[i] + 1.0);
    s += ref.weights[i] * spec.z1(p) / spec.z2(p);
  }
  return 0.5 * (b - a) * s;
}

}  // namespace

Vec sturm_liouville_weight(const SturmLiouvilleSpec& spec, const Vec& sorted_points) {
  Vec w = Vec::Ones(sorted_points.size());
  if (!spec.has_advection()) return w;
  double acc = 0.0;
  double prev = spec.domain.lo;
  for (Eigen::Index i = 0; i < sorted_points.size(); ++i) {
    acc += log_weight_increment(spec, prev, sorted_points[i]);
    prev = sorted_points[i];
    w[i] = std::exp(acc);
  }
  return w;
}

Vec FdOperator::apply(const Vec& x) const {
  const int n = unknowns();
  Vec y(n);
  for (int i = 0; i < n; ++i) {
    double v = diag[i] * x[i];
    if (i > 0) v += off[i - 1] * x[i - 1];
    if (i + 1 < n) v += off[i] * x[i + 1];
    y[i] = v;
  }
  return y;
}

FdOperator build_fd_operator(const SturmLiouvilleSpec& spec, int grid_n) {
  spec.validate();
  if (grid_n < 3) throw Error(ErrorKind::Resolution, "finite-difference grid needs at least 3 nodes");
  FdOperator op;
  op.grid = uniform_grid(spec.domain, grid_n);
  const double dx = spec.domain.length() / (grid_n - 1);

  // weights at nodes and at midpoints, interleaved so one cumulative pass suffices
  Vec pts(2 * grid_n - 1);
  for (int i = 0; i < grid_n; ++i) pts[2 * i] = op.grid[i];
  for (int i = 0; i + 1 < grid_n; ++i) pts[2 * i + 1] = 0.5 * (op.grid[i] + op.grid[i + 1]);
  const Vec w_all = sturm_liouville_weight(spec, pts);
  op.weight.resize(grid_n);
  Vec a_half(grid_n - 1);
  for (int i = 0; i < grid_n; ++i) op.weight[i] = w_all[2 * i];
  for (int i = 0; i + 1 < grid_n; ++i) a_half[i] = w_all[2 * i + 1] * spec.z2(pts[2 * i + 1]);

  op.cell = Vec::Constant(grid_n, dx);
  op.cell[0] = op.cell[grid_n - 1] = 0.5 * dx;

  op.first = spec.left.dirichlet() ? 1 : 0;
  op.last = spec.right.dirichlet() ? grid_n - 2 : grid_n - 1;
  const int n = op.unknowns();
  if (n < 1) throw Error(ErrorKind::Resolution, "no unknown nodes");
  op.diag.resize(n);
  op.off.resize(std::max(n - 1, 0));
  op.mass.resize(n);
  for (int k = 0; k < n; ++k) {
    const int i = op.first + k;
    double d = 0.0;
    if (i > 0) d -= a_half[i - 1] / dx;
    if (i + 1 < grid_n) d -= a_half[i] / dx;
    op.diag[k] = d;
    op.mass[k] = op.weight[i] * op.cell[i];
    if (k + 1 < n) op.off[k] = a_half[i] / dx;
  }
  // Robin ends: the boundary flux a*xi_p is replaced by -a*(h1/h2)*xi
  if (!spec.left.dirichlet()) {
    const double a = op.weight[0] * spec.z2(spec.domain.lo);
    op.diag[0] += a * spec.left.h1 / spec.left.h2;
  }
  if (!spec.right.dirichlet()) {
    const double a = op.weight[grid_n - 1] * spec.z2(spec.domain.hi);
    op.diag[n - 1] -= a * spec.right.h1 / spec.right.h2;
  }
  return op;
}

Vec solve_tridiagonal(const Vec& sub, const Vec& diag, const Vec& super, Vec rhs) {
  const Eigen::Index n = diag.size();
  Vec c(n);
  double beta = diag[0];
  if (beta == 0.0) throw Error(ErrorKind::Solver, "zero pivot in tridiagonal solve");
  rhs[0] /= beta;
  for (Eigen::Index i = 1; i < n; ++i) {
    c[i - 1] = super[i - 1] / beta;
    beta = diag[i] - sub[i - 1] * c[i - 1];
    if (beta == 0.0) throw Error(ErrorKind::Solver, "zero pivot in tridiagonal solve");
    rhs[i] = (rhs[i] - sub[i - 1] * rhs[i - 1]) / beta;
  }
  for (Eigen::Index i = n - 2; i >= 0; --i) rhs[i] -= c[i] * rhs[i + 1];
  return rhs;
}

}  // namespace pdeetc
