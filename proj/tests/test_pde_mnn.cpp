#include "pdeetc/examples.hpp"
#include "pdeetc/mnn.hpp"
#include "pdeetc/pde_sim.hpp"
#include "pdeetc/profiles.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

using namespace pdeetc;
using Catch::Approx;

namespace {
const double pi = 3.141592653589793;

PlantModel heat_plant() {
  PlantModel p;
  p.spec.domain = {0.0, pi};
  p.spec.z2 = [](double) { return 1.0; };
  p.f.coeffs = {0.0};
  p.b2 = {builtin_profile("zero", p.spec.domain)};
  p.cbar = {builtin_profile("one", p.spec.domain)};
  p.xi0 = [](double x) { return std::sin(x); };
  return p;
}
}  // namespace

TEST_CASE("heat equation mode decays like exp(-t)", "[pde_sim]") {
  PdeSimConfig cfg;
  cfg.grid_n = 512;
  cfg.dt = 1e-4;
  cfg.T = 1.0;
  cfg.stride = 1000;
  const FieldTrace tr = simulate(heat_plant(), nullptr, Disturbance(), cfg);
  const double expected = std::sqrt(pi / 2.0) * std::exp(-1.0);
  CHECK(tr.l2norms[tr.steps() - 1] == Approx(expected).epsilon(2e-3));
}

TEST_CASE("zero initial field with zero input stays zero", "[pde_sim]") {
  PlantModel p = example1_plant();
  p.xi0 = [](double) { return 0.0; };
  PdeSimConfig cfg;
  cfg.T = 0.5;
  const FieldTrace tr = simulate(p, nullptr, Disturbance(), cfg);
  CHECK(tr.l2norms.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("explicit-term stability bound is enforced", "[pde_sim]") {
  PdeSimConfig cfg;
  cfg.dt = 1.0;
  CHECK_THROWS_AS(simulate(example1_plant(), nullptr, Disturbance(), cfg), Error);
}

TEST_CASE("analytic Jacobian matches central differences", "[mnn]") {
  const Mnn net = init_mnn(2, 5, 1.0, 1.0, 7);
  TrainingSet data;
  data.inputs = Mat::Random(12, 2);
  data.targets = Mat::Random(12, 2);
  const Mat J = residual_jacobian(net, data);
  const Vec theta = pack_parameters(net);
  const double h = 1e-6;
  for (Eigen::Index k = 0; k < theta.size(); ++k) {
    Vec tp = theta, tm = theta;
    tp[k] += h;
    tm[k] -= h;
    const Vec fd = (residuals(unpack_parameters(net, tp), data) - residuals(unpack_parameters(net, tm), data)) / (2 * h);
    CHECK((J.col(k) - fd).norm() <= 1e-5 * std::max(1.0, fd.norm()));
  }
}

TEST_CASE("activation antiderivative matches quadrature", "[mnn]") {
  for (double s : {-3.0, -0.5, 0.0, 0.7, 2.5})
    for (double r : {0.5, 1.0, 2.0}) {
      const double q = 1.3;
      const double numeric = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
          [&](double x) { return activation(x, q, r); }, 0.0, s, 10, 1e-14);
      CHECK(activation_integral(s, q, r) == Approx(numeric).margin(1e-9));
    }
}

TEST_CASE("activation stays inside its sector", "[mnn][property]") {
  const Mnn net = table1_network();
  const SectorBounds sb = sector_bounds(net);
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(-20.0, 20.0);
  for (int n = 0; n < 2000; ++n) {
    const double s = u(rng);
    if (std::abs(s) < 1e-9) continue;
    for (Eigen::Index i = 0; i < net.q.size(); ++i) {
      const double g = activation(s, net.q[i], net.r[i]) / s;
      CHECK(g >= sb.g_min[i] - 1e-15);
      CHECK(g <= sb.g_max[i] + 1e-15);
    }
  }
}

TEST_CASE("LM loss is non-increasing and beats the gradient baseline", "[mnn][property]") {
  const PlantModel plant = example1_plant();
  auto basis = std::make_shared<const ModalBasis>(analytic_dirichlet_basis(1.0, plant.spec.domain, 2));
  Mat A = Mat::Zero(2, 2);
  A(0, 0) = -1.0;
  A(1, 1) = -4.0;
  SlowModelSampler sampler(A, galerkin_nonlinearity(plant.f, basis));
  const TrainingSet data = generate_targets(sampler, Vec::Zero(2), Vec::Constant(2, 2.0), 0.25, 1e-3, A);
  const Mnn init = init_mnn(2, 8, 1.0, 1.0, 1);
  LmConfig cfg;
  cfg.k_max = 60;
  const TrainResult lm = train_lm(init, data, cfg);
  for (size_t i = 1; i < lm.loss_history.size(); ++i) CHECK(lm.loss_history[i] <= lm.loss_history[i - 1]);
  const TrainResult bp = train_bp_baseline(init, data, 0.01, lm.iterations);
  CHECK(training_loss(bp.net, data) > training_loss(lm.net, data));
}

TEST_CASE("training is deterministic for a fixed seed", "[mnn][property]") {
  TrainingSet data;
  data.inputs = Mat::Random(20, 2);
  data.targets = data.inputs.array().square();
  LmConfig cfg;
  cfg.k_max = 20;
  const TrainResult a = train_lm(init_mnn(2, 4, 1, 1, 9), data, cfg);
  const TrainResult b = train_lm(init_mnn(2, 4, 1, 1, 9), data, cfg);
  CHECK(pack_parameters(a.net) == pack_parameters(b.net));
}
