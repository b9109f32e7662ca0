#pragma once

#include <Eigen/Dense>

#include <functional>

namespace pdeetc {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using Profile = std::function<double(double)>;

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
  double length() const { return hi - lo; }
};

/// Nodes and weights of a quadrature rule on some interval.
struct QuadratureGrid {
  Vec nodes;
  Vec weights;

  double integrate(const Vec& values) const { return weights.dot(values); }
  Vec sample(const Profile& f) const;
};

/// Gauss-Legendre rule with n nodes on [-1, 1] (Newton iteration on P_n).
QuadratureGrid gauss_legendre(int n);

/// Composite Gauss-Legendre: `panels` equal panels with `order` nodes each.
QuadratureGrid composite_gauss_legendre(Interval domain, int panels = 64, int order = 8);

/// Integration weights on a uniform grid (composite Simpson, with a 3/8 panel
/// at the end when the interval count is odd). Falls back to the trapezoid
/// rule below four intervals.
Vec uniform_grid_weights(const Vec& grid);

/// Uniform grid of n nodes including both endpoints.
Vec uniform_grid(Interval domain, int n);

/// Piecewise-linear interpolation of tabulated (grid, values) at x.
/// The grid must be strictly increasing; x outside the grid is clamped.
double interpolate_linear(const Vec& grid, const Vec& values, double x);

}  // namespace pdeetc
