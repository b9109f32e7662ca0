#include "pdeetc/sdp.hpp"

#include "pdeetc/error.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <functional>
#include <limits>

namespace pdeetc {

const char* to_string(SdpStatus s) {
  switch (s) {
    case SdpStatus::Feasible: return "feasible";
    case SdpStatus::Optimal: return "optimal";
    case SdpStatus::Infeasible: return "infeasible";
    case SdpStatus::NumericalFailure: return "numerical-failure";
  }
  return "numerical-failure";
}

namespace {

struct Triplet {
  int row;
  int col;
  double value;
};

struct SparseCoef {
  int var;
  std::vector<Triplet> entries;
  std::vector<int> rows;  // distinct row indices present
};

// G(z) = G0 + sum_i z_i G_i  required positive definite.
struct Cone {
  int dim = 0;
  Mat G0;
  std::vector<SparseCoef> coefs;
};

Cone make_cone(const LmiConstraint& c, double margin) {
  const double sign = c.sense == Sense::NegativeDefinite ? -1.0 : 1.0;
  Cone k;
  k.dim = static_cast<int>(c.F.rows());
  const Mat c0 = sign * c.F.constant();
  k.G0 = 0.5 * (c0 + c0.transpose()) - margin * Mat::Identity(k.dim, k.dim);
  for (const auto& [var, m] : c.F.terms()) {
    const Mat s = 0.5 * sign * (m + m.transpose());
    SparseCoef sc;
    sc.var = var;
    std::vector<char> seen(k.dim, 0);
    for (int j = 0; j < k.dim; ++j)
      for (int i = 0; i < k.dim; ++i)
        if (s(i, j) != 0.0) {
          sc.entries.push_back({i, j, s(i, j)});
          if (!seen[i]) {
            seen[i] = 1;
            sc.rows.push_back(i);
          }
        }
    if (!sc.entries.empty()) k.coefs.push_back(std::move(sc));
  }
  return k;
}

Mat cone_value(const Cone& k, const Vec& z, int slack_index) {
  Mat G = k.G0;
  for (const auto& c : k.coefs)
    for (const auto& t : c.entries) G(t.row, t.col) += z[c.var] * t.value;
  if (slack_index >= 0) G.diagonal().array() += z[slack_index];
  return G;
}

struct Barrier {
  const std::vector<Cone>& cones;
  int n_x;             // decision variables
  int slack_index;     // -1 in phase 2, n_x in phase 1
  double radius;
  Vec cost;            // linear cost over z

  int size() const { return slack_index >= 0 ? n_x + 1 : n_x; }

  // barrier value; returns +inf outside the domain
  double value(const Vec& z, double t) const {
    double f = t * cost.dot(z);
    const double r2 = radius * radius - z.head(n_x).squaredNorm();
    if (!(r2 > 0.0)) return std::numeric_limits<double>::infinity();
    f -= std::log(r2);
    for (const auto& k : cones) {
      Eigen::LLT<Mat> llt(cone_value(k, z, slack_index));
      if (llt.info() != Eigen::Success) return std::numeric_limits<double>::infinity();
      const Vec d = llt.matrixLLT().diagonal();
      if ((d.array() <= 0.0).any()) return std::numeric_limits<double>::infinity();
      f -= 2.0 * d.array().log().sum();
    }
    return f;
  }

  bool derivatives(const Vec& z, double t, Vec& g, Mat& H) const {
    const int n = size();
    g = t * cost;
    H = Mat::Zero(n, n);
    const Vec x = z.head(n_x);
    const double r2 = radius * radius - x.squaredNorm();
    if (!(r2 > 0.0)) return false;
    g.head(n_x) += 2.0 * x / r2;
    H.topLeftCorner(n_x, n_x).diagonal().array() += 2.0 / r2;
    H.topLeftCorner(n_x, n_x) += 4.0 * x * x.transpose() / (r2 * r2);
    for (const auto& k : cones) {
      Eigen::LLT<Mat> llt(cone_value(k, z, slack_index));
      if (llt.info() != Eigen::Success) return false;
      const Mat S = llt.solve(Mat::Identity(k.dim, k.dim));
      // local list of coefficient matrices incl. the phase-1 identity
      std::vector<const SparseCoef*> list;
      for (const auto& c : k.coefs) list.push_back(&c);
      SparseCoef ident;
      if (slack_index >= 0) {
        ident.var = slack_index;
        for (int i = 0; i < k.dim; ++i) {
          ident.entries.push_back({i, i, 1.0});
          ident.rows.push_back(i);
        }
        list.push_back(&ident);
      }
      std::vector<Mat> Y(list.size());
      for (size_t j = 0; j < list.size(); ++j) {
        const SparseCoef& c = *list[j];
        double tr = 0.0;
        for (const auto& e : c.entries) tr += e.value * S(e.col, e.row);
        g[c.var] -= tr;
        // Y = S G_j S using the row support of G_j
        Mat T = Mat::Zero(k.dim, k.dim);
        for (const auto& e : c.entries) T.row(e.row) += e.value * S.row(e.col);
        Mat Sr(k.dim, static_cast<Eigen::Index>(c.rows.size()));
        Mat Tr(static_cast<Eigen::Index>(c.rows.size()), k.dim);
        for (size_t q = 0; q < c.rows.size(); ++q) {
          Sr.col(static_cast<Eigen::Index>(q)) = S.col(c.rows[q]);
          Tr.row(static_cast<Eigen::Index>(q)) = T.row(c.rows[q]);
        }
        Y[j] = Sr * Tr;
      }
      for (size_t i = 0; i < list.size(); ++i) {
        const SparseCoef& ci = *list[i];
        for (size_t j = 0; j < list.size(); ++j) {
          double h = 0.0;
          for (const auto& e : ci.entries) h += e.value * Y[j](e.col, e.row);
          H(ci.var, list[j]->var) += h;
        }
      }
    }
    return true;
  }
};

enum class CenterStatus { Ok, Numerical };

// Newton centering at fixed t with feasibility-preserving backtracking.
CenterStatus center(const Barrier& b, Vec& z, double t, const SdpOptions& opt, int& steps, std::string& msg,
                    const std::function<bool(const Vec&)>& early_stop = nullptr) {
  for (int it = 0; it < opt.max_newton; ++it) {
    Vec g;
    Mat H;
    if (!b.derivatives(z, t, g, H)) {
      msg = "iterate left the barrier domain";
      return CenterStatus::Numerical;
    }
    // Jacobi scaling, then an eigen-solve with the spectrum clipped at the
    // condition limit: directions that only the norm ball curbs get a damped
    // (gradient-like) step instead of an unbounded Newton one.
    const Vec d = H.diagonal().cwiseMax(1e-300).cwiseSqrt().cwiseInverse();
    const Mat Hs = d.asDiagonal() * H * d.asDiagonal();
    Eigen::SelfAdjointEigenSolver<Mat> es(Hs);
    if (es.info() != Eigen::Success) {
      msg = "Newton system eigendecomposition failed";
      return CenterStatus::Numerical;
    }
    const Vec gs = d.asDiagonal() * g;
    const Vec coeff = es.eigenvectors().transpose() * gs;
    const double floor = es.eigenvalues().maxCoeff() / opt.max_condition;
    if (!(floor > 0.0) || !std::isfinite(floor)) {
      msg = "Newton system is not positive definite";
      return CenterStatus::Numerical;
    }
    const Vec scaled = coeff.array() / es.eigenvalues().array().max(floor);
    const Vec step = -es.eigenvectors() * scaled;
    const Vec dz = d.asDiagonal() * step;
    const double decrement = -g.dot(dz);
    ++steps;
    if (!(decrement >= 0.0)) {
      msg = "Newton direction is not a descent direction";
      return CenterStatus::Numerical;
    }
    if (decrement < 1e-10) return CenterStatus::Ok;
    const double f0 = b.value(z, t);
    double alpha = 1.0;
    bool moved = false;
    while (alpha > 1e-14) {
      const Vec trial = z + alpha * dz;
      const double f1 = b.value(trial, t);
      if (std::isfinite(f1) && f1 <= f0 - 0.25 * alpha * decrement) {
        z = trial;
        moved = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!moved) return CenterStatus::Ok;  // no further progress possible at this t
    if (early_stop && early_stop(z)) return CenterStatus::Ok;
  }
  return CenterStatus::Ok;
}

// Orthonormal basis of the variable directions that change at least one constraint.
Mat visible_directions(int n, const std::vector<LmiConstraint>& constraints) {
  if (n == 0) return Mat::Zero(0, 0);
  Mat gram = Mat::Zero(n, n);
  for (const auto& c : constraints) {
    std::vector<std::pair<int, Mat>> sym_terms;
    for (const auto& [i, m] : c.F.terms()) sym_terms.push_back({i, 0.5 * (m + m.transpose())});
    for (const auto& [i, a] : sym_terms)
      for (const auto& [j, b] : sym_terms) gram(i, j) += (a.array() * b.array()).sum();
  }
  Eigen::SelfAdjointEigenSolver<Mat> es(gram);
  const double top = n ? std::max(es.eigenvalues().maxCoeff(), 0.0) : 0.0;
  std::vector<int> keep;
  for (int k = 0; k < n; ++k)
    if (es.eigenvalues()[k] > 1e-12 * top) keep.push_back(k);
  if (static_cast<int>(keep.size()) == n) return Mat::Identity(n, n);
  Mat T(n, static_cast<Eigen::Index>(keep.size()));
  for (size_t k = 0; k < keep.size(); ++k) T.col(static_cast<Eigen::Index>(k)) = es.eigenvectors().col(keep[k]);
  return T;
}

double min_eig(const Mat& G) {
  Eigen::SelfAdjointEigenSolver<Mat> es(G, Eigen::EigenvaluesOnly);
  return es.eigenvalues()[0];
}

}  // namespace

std::vector<double> constraint_slacks(const std::vector<LmiConstraint>& constraints, const Vec& x) {
  std::vector<double> out;
  for (const auto& c : constraints) {
    Mat F = c.F.evaluate(x);
    F = 0.5 * (F + F.transpose());
    if (c.sense == Sense::NegativeDefinite) F = -F;
    out.push_back(F.size() ? min_eig(F) : std::numeric_limits<double>::infinity());
  }
  return out;
}

SdpResult sdp_solve(int n_vars_in, const std::vector<LmiConstraint>& constraints, const Vec& objective,
                    const SdpOptions& opt) {
  int n_vars = n_vars_in;
  SdpResult res;
  for (const auto& c : constraints) {
    res.names.push_back(c.name);
    if (c.F.rows() != c.F.cols()) throw Error(ErrorKind::InvalidArgument, "constraint '" + c.name + "' is not square");
    for (const auto& [i, m] : c.F.terms())
      if (i < 0 || i >= n_vars) throw Error(ErrorKind::InvalidArgument, "variable index out of range");
  }
  if (objective.size() != 0 && objective.size() != n_vars)
    throw Error(ErrorKind::InvalidArgument, "objective size does not match the variable count");

  // Directions of x that no constraint sees make the barrier Hessian singular
  // (e.g. equal skew parts added to two variables that only enter through
  // their symmetric parts and their difference); solve in the orthogonal
  // complement x = T y.
  const Mat T = visible_directions(n_vars, constraints);
  std::vector<LmiConstraint> reduced;
  for (const auto& c : constraints) {
    if (c.F.rows() == 0) continue;
    AffineMat F(c.F.constant());
    for (int j = 0; j < T.cols(); ++j) {
      Mat coef = Mat::Zero(c.F.rows(), c.F.cols());
      for (const auto& [i, m] : c.F.terms())
        if (T(i, j) != 0.0) coef += T(i, j) * m;
      coef = (coef.array().abs() < 1e-15 * std::max(1.0, coef.cwiseAbs().maxCoeff())).select(0.0, coef);
      if (!coef.isZero(0.0)) F.add_term(j, coef);
    }
    reduced.push_back({c.name, F, c.sense});
  }
  n_vars = static_cast<int>(T.cols());
  if (n_vars == 0) {
    // nothing to search: the constant matrices decide
    res.x = Vec::Zero(n_vars_in);
    res.slack = constraint_slacks(constraints, res.x);
    double worst = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < res.slack.size(); ++i)
      if (res.slack[i] < worst) worst = res.slack[i], res.binding = res.names[i];
    res.phase1_value = res.slack.empty() ? -1.0 : -worst;
    res.status = res.slack.empty() || worst > opt.margin ? (objective.size() ? SdpStatus::Optimal : SdpStatus::Feasible)
                                                  : SdpStatus::Infeasible;
    return res;
  }
  const Vec objective_y = objective.size() ? Vec(T.transpose() * objective) : Vec();

  std::vector<Cone> cones;
  int total_dim = 1;  // the norm ball
  for (const auto& c : reduced) {
    cones.push_back(make_cone(c, opt.margin));
    total_dim += cones.back().dim;
  }

  // ---------------- phase 1
  Vec z = Vec::Zero(n_vars + 1);
  double worst = 0.0;
  for (const auto& k : cones) worst = std::min(worst, min_eig(cone_value(k, z, -1)));
  z[n_vars] = -worst + 1.0;
  Barrier p1{cones, n_vars, n_vars, opt.radius, Vec::Zero(n_vars + 1)};
  p1.cost[n_vars] = 1.0;
  const bool has_objective = objective.size() != 0;
  double t = 1.0;
  bool strictly_feasible = false;
  const double stop_at = (has_objective || !opt.center) ? 0.0 : -opt.center_target;
  auto feasible_now = [&](const Vec& zz) { return zz[n_vars] < stop_at; };
  while (true) {
    std::string msg;
    const auto st = center(p1, z, t, opt, res.newton_steps, msg, feasible_now);
    if (st == CenterStatus::Numerical) {
      res.status = SdpStatus::NumericalFailure;
      res.message = "phase 1: " + msg;
      res.x = T * z.head(n_vars);
      res.phase1_value = z[n_vars];
      res.slack = constraint_slacks(constraints, res.x);
      return res;
    }
    if (z[n_vars] < 0.0) strictly_feasible = true;
    if (z[n_vars] < stop_at) break;
    if (total_dim / t < opt.gap_tol) break;
    // certified infeasible: the barrier optimum lower bound stays positive
    if (z[n_vars] - total_dim / t > 0.0) break;
    t /= opt.barrier_factor;
  }
  res.phase1_value = z[n_vars];
  Vec x = z.head(n_vars);
  if (!strictly_feasible) {
    res.status = SdpStatus::Infeasible;
    res.x = T * x;
    res.slack = constraint_slacks(constraints, res.x);
    res.message = "phase 1 optimum is positive (best violation " + std::to_string(res.phase1_value) + ")";
  } else if (has_objective) {
    // ---------------- phase 2
    Barrier p2{cones, n_vars, -1, opt.radius, objective_y};
    t = 1.0;
    while (true) {
      std::string msg;
      if (center(p2, x, t, opt, res.newton_steps, msg) == CenterStatus::Numerical) {
        res.status = SdpStatus::NumericalFailure;
        res.message = "phase 2: " + msg;
        break;
      }
      if (total_dim / t < opt.gap_tol) break;
      t /= opt.barrier_factor;
    }
    if (res.message.empty()) res.status = SdpStatus::Optimal;
    res.x = T * x;
    res.objective = objective.dot(res.x);
  } else {
    res.status = SdpStatus::Feasible;
    res.x = T * x;
  }

  res.slack = constraint_slacks(constraints, res.x);
  double smallest = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < res.slack.size(); ++i)
    if (res.slack[i] < smallest) {
      smallest = res.slack[i];
      res.binding = res.names[i];
    }
  if (res.ok() && smallest < 0.5 * opt.margin) {
    res.status = SdpStatus::NumericalFailure;
    res.message = "eigenvalue re-check failed for '" + res.binding + "' (slack " + std::to_string(smallest) + ")";
  }
  return res;
}

}  // namespace pdeetc
