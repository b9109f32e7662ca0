#pragma once

#include "pdeetc/galerkin.hpp"

namespace pdeetc {

/// Symmetric finite-volume form of the weighted operator w*A on a uniform grid:
/// K xi = lambda M xi on the unknown nodes, with K tridiagonal and M diagonal.
struct FdOperator {
  Vec grid;        // all nodes, boundaries included
  int first = 0;   // index of the first unknown node
  int last = 0;    // index of the last unknown node (inclusive)
  Vec diag;        // K diagonal (size n_unknown)
  Vec off;         // K off-diagonal (size n_unknown - 1)
  Vec mass;        // M diagonal (w * cell width)
  Vec weight;      // w at every grid node
  Vec cell;        // cell width at every grid node (trapezoid weights)

  int unknowns() const { return last - first + 1; }
  /// y = K x on the unknowns.
  Vec apply(const Vec& x) const;
};

FdOperator build_fd_operator(const SturmLiouvilleSpec& spec, int grid_n);

/// Weight w(p) = exp(int_{lo}^{p} z1/z2) at sorted points (1 when z1 is empty).
Vec sturm_liouville_weight(const SturmLiouvilleSpec& spec, const Vec& sorted_points);

/// Solve the tridiagonal system (sub, diag, super) x = rhs (Thomas algorithm).
Vec solve_tridiagonal(const Vec& sub, const Vec& diag, const Vec& super, Vec rhs);

}  // namespace pdeetc
