#pragma once

#include "pdeetc/galerkin.hpp"
#include "pdeetc/pde_sim.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace pdeetc {

/// Three-layer network f_nn(xi) = W mu(V xi) with bipolar sigmoid neurons
/// mu_i(s) = q_i (2 / (1 + exp(-s / r_i)) - 1).
struct Mnn {
  Mat W;  // m x n_h
  Mat V;  // n_h x m
  Vec q;  // n_h
  Vec r;  // n_h

  int m() const { return static_cast<int>(W.rows()); }
  int hidden() const { return static_cast<int>(W.cols()); }
  void validate() const;
  Vec hidden_output(const Vec& xi) const;
};

double activation(double s, double q, double r);
Vec activation_vec(const Vec& s, const Vec& q, const Vec& r);
double activation_derivative(double s, double q, double r);
/// Closed form of int_0^s mu(x) dx.
double activation_integral(double s, double q, double r);

Vec forward(const Mnn& net, const Vec& xi);

/// Weights uniform in [-1, 1] from `seed`.
Mnn init_mnn(int m, int hidden, double q, double r, std::uint64_t seed);

struct SectorBounds {
  Vec g_min;
  Vec g_max;
  Mat G_min() const { return g_min.asDiagonal(); }
  Mat G_max() const { return g_max.asDiagonal(); }
  Mat G() const { return (g_max - g_min).asDiagonal(); }
};

SectorBounds sector_bounds(const Mnn& net);

struct TrainingSet {
  Mat inputs;   // N x m
  Mat targets;  // N x m
  double dTs = 0.0;
  Vec region_lo;
  Vec region_hi;
  int discarded = 0;

  Eigen::Index size() const { return inputs.rows(); }
};

using SlowMap = std::function<Vec(const Vec&)>;

/// Advances a slow state by dt with u = d = 0.
class SlowSampler {
 public:
  virtual ~SlowSampler() = default;
  virtual Vec advance(const Vec& xi, double dt) const = 0;
};

/// Simulates the full PDE from the field sum xi_j phi_j and reconstructs both
/// end states from k point measurements.
class PdeSampler : public SlowSampler {
 public:
  PdeSampler(PlantModel plant, BasisPtr basis, int grid_n = 256, int substeps = 10, int sensors = 32);
  Vec advance(const Vec& xi, double dt) const override;
  Vec measure(const Vec& field) const;

 private:
  PlantModel plant_;
  BasisPtr basis_;
  int grid_n_;
  int substeps_;
  Vec grid_;
  Vec sensors_;
  std::vector<Eigen::Index> sensor_index_;
};

/// RK4 on xi' = A xi + f_s(xi).
class SlowModelSampler : public SlowSampler {
 public:
  SlowModelSampler(Mat A, SlowMap fs, int substeps = 10);
  Vec advance(const Vec& xi, double dt) const override;

 private:
  Mat A_;
  SlowMap fs_;
  int substeps_;
};

/// Galerkin image of a pointwise nonlinearity: f_s,i(xi) = <phi_i, f(sum xi_j phi_j)>.
SlowMap galerkin_nonlinearity(const Polynomial& f, BasisPtr basis);

/// Uniform grid over the box [lo, hi] with the given spacing (row per point).
Mat box_grid(const Vec& lo, const Vec& hi, double spacing);

/// target = (xi(t + dTs) - xi(t)) / dTs - A xi(t) at every grid point of the box.
TrainingSet generate_targets(const SlowSampler& sampler, const Vec& lo, const Vec& hi, double spacing,
                             double dTs, const Mat& A);

struct LmConfig {
  double mu0 = 1e-3;
  double eps_c = 1e-14;
  int k_max = 200;
  double damping_up = 10.0;
  double damping_down = 0.1;
  double damping_max = 1e16;
  bool per_channel = false;

  void validate() const;
};

struct TrainResult {
  Mnn net;
  std::vector<double> loss_history;  // loss after each iteration (index 0 = initial)
  int iterations = 0;
  bool converged = false;
  bool stalled = false;
  bool diverged = false;
};

/// E = (1 / 2N) sum_n ||f_nn(x_n) - t_n||^2
double training_loss(const Mnn& net, const TrainingSet& data);
/// Mean of squared residual entries.
double training_mse(const Mnn& net, const TrainingSet& data);
/// Residuals stacked output-major (N*m).
Vec residuals(const Mnn& net, const TrainingSet& data);
/// d residuals / d theta, theta = [W row-major, V row-major].
Mat residual_jacobian(const Mnn& net, const TrainingSet& data);
/// Gradient of the training loss with respect to theta.
Vec loss_gradient(const Mnn& net, const TrainingSet& data);
Vec pack_parameters(const Mnn& net);
Mnn unpack_parameters(const Mnn& shape, const Vec& theta);

TrainResult train_lm(const Mnn& init, const TrainingSet& data, const LmConfig& cfg);
TrainResult train_bp_baseline(const Mnn& init, const TrainingSet& data, double rate, int iters);

/// delta = 1.1 * max ||f(xi) - f_nn(xi)|| / ||xi|| over the grid, points with
/// ||xi|| < 1e-6 excluded.
double estimate_delta(const Mnn& net, const SlowMap& true_f, const Vec& lo, const Vec& hi, double spacing);
double estimate_delta_raw(const Mnn& net, const SlowMap& true_f, const Mat& points);

/// Weight files: blocks introduced by "block,<name>,<rows>,<cols>" with names W, V (or VT), q, r.
void write_weights_csv(const Mnn& net, const std::string& path);
Mnn read_weights_csv(const std::string& path);

}  // namespace pdeetc
