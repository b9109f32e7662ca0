#include "pdeetc/quadrature.hpp"

#include "pdeetc/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace pdeetc {

Vec QuadratureGrid::sample(const Profile& f) const {
  Vec out(nodes.size());
  for (Eigen::Index i = 0; i < nodes.size(); ++i) out[i] = f(nodes[i]);
  return out;
}

QuadratureGrid gauss_legendre(int n) {
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "Gauss-Legendre order must be >= 1");
  QuadratureGrid rule{Vec(n), Vec(n)};
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // recompute derivative at the converged node
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = pk;
    }
    dp = (n == 1) ? 1.0 : n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  return rule;
}

QuadratureGrid composite_gauss_legendre(Interval domain, int panels, int order) {
  if (panels < 1) throw Error(ErrorKind::InvalidArgument, "panel count must be >= 1");
  if (!(domain.hi > domain.lo)) throw Error(ErrorKind::InvalidArgument, "empty interval");
  const QuadratureGrid ref = gauss_legendre(order);
  QuadratureGrid grid{Vec(panels * order), Vec(panels * order)};
  const double width = domain.length() / panels;
  for (int k = 0; k < panels; ++k) {
    const double a = domain.lo + k * width;
    for (int i = 0; i < order; ++i) {
      grid.nodes[k * order + i] = a + 0.5 * width * (ref.nodes[i] + 1.0);
      grid.weights[k * order + i] = 0.5 * width * ref.weights[i];
    }
  }
  return grid;
}

Vec uniform_grid(Interval domain, int n) {
  if (n < 2) throw Error(ErrorKind::InvalidArgument, "uniform grid needs at least 2 nodes");
  Vec g = Vec::LinSpaced(n, domain.lo, domain.hi);
  return g;
}

Vec uniform_grid_weights(const Vec& grid) {
  const Eigen::Index n = grid.size();
  if (n < 2) throw Error(ErrorKind::InvalidArgument, "grid needs at least 2 nodes");
  const Eigen::Index intervals = n - 1;
  const double dx = (grid[n - 1] - grid[0]) / static_cast<double>(intervals);
  Vec w = Vec::Zero(n);
  if (intervals < 4) {
    w.setConstant(dx);
    w[0] = w[n - 1] = 0.5 * dx;
    return w;
  }
  const Eigen::Index simpson_intervals = (intervals % 2 == 0) ? intervals : intervals - 3;
  for (Eigen::Index i = 0; i < simpson_intervals; i += 2) {
    w[i] += dx / 3.0;
    w[i + 1] += 4.0 * dx / 3.0;
    w[i + 2] += dx / 3.0;
  }
  if (simpson_intervals != intervals) {
    const Eigen::Index s = simpson_intervals;
    w[s] += 3.0 * dx / 8.0;
    w[s + 1] += 9.0 * dx / 8.0;
    w[s + 2] += 9.0 * dx / 8.0;
    w[s + 3] += 3.0 * dx / 8.0;
  }
  return w;
}

double interpolate_linear(const Vec& grid, const Vec& values, double x) {
  const Eigen::Index n = grid.size();
  if (x <= grid[0]) return values[0];
  if (x >= grid[n - 1]) return values[n - 1];
  const double* begin = grid.data();
  const double* it = std::upper_bound(begin, begin + n, x);
  const Eigen::Index hi = it - begin;
  const Eigen::Index lo = hi - 1;
  const double t = (x - grid[lo]) / (grid[hi] - grid[lo]);
  return (1.0 - t) * values[lo] + t * values[hi];
}

}  // namespace pdeetc
