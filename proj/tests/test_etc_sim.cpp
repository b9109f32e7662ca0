#include "pdeetc/etc_sim.hpp"
#include "pdeetc/examples.hpp"
#include "pdeetc/error.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>

using namespace pdeetc;

namespace {

SlowSystem example1_slow() {
  const PlantModel plant = example1_plant();
  auto basis = std::make_shared<const ModalBasis>(analytic_dirichlet_basis(1.0, plant.spec.domain, 2));
  return assemble_slow_system(basis, plant.b2, plant.b1, plant.cbar);
}

Mat lam(double v) { return Mat::Constant(1, 1, v); }

Vec v1(double x) { return Vec::Constant(1, x); }

bool throws_kind(ErrorKind k, const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind() == k;
  }
  return false;
}

}  // namespace

TEST_CASE("trigger rule boundary cases", "[etc]") {
  TriggerConfig c{0.1, 0.01, lam(1.0)};
  // silent inside the waiting window regardless of the error
  CHECK_FALSE(check_trigger(c, 0.05, 0.0, v1(1.0), v1(-5.0)));
  CHECK(check_trigger(c, 0.1, 0.0, v1(1.0), v1(-5.0)));
  // zero output never fires with eps > 0
  CHECK_FALSE(check_trigger(c, 1.0, 0.0, v1(0.0), v1(0.0)));
  CHECK_FALSE(check_trigger(c, 1.0, 0.0, v1(1.0), v1(1.0)));
  // equality fires
  c.epsilon = 1.0;
  CHECK(check_trigger(c, 1.0, 0.0, v1(1.0), v1(0.0)));
  // eps = 0 fires as soon as the window closes
  c.epsilon = 0.0;
  CHECK(check_trigger(c, 0.1, 0.0, v1(1.0), v1(1.0)));
  CHECK(check_trigger(c, 0.1, 0.0, v1(0.0), v1(0.0)));
}

TEST_CASE("both control-law branches equal -K y(t_k)", "[etc][property]") {
  std::srand(3);
  for (int trial = 0; trial < 50; ++trial) {
    SwitchingController ctrl;
    ctrl.K = Mat::Random(2, 3);
    ctrl.C = Mat::Random(3, 4);
    const Vec xi_tk = Vec::Random(4), xi_t = Vec::Random(4);
    ctrl.y_held = ctrl.C * xi_tk;
    const Vec u = control_law(ctrl);
    const ControlBranches b = control_law_branches(ctrl, xi_t, xi_tk);
    CHECK((b.waiting - u).norm() <= 1e-12 * std::max(1.0, u.norm()));
    CHECK((b.event - u).norm() <= 1e-12 * std::max(1.0, u.norm()));
  }
}

TEST_CASE("step trigger enforces the waiting window and rejects misaligned h", "[etc]") {
  CHECK(throws_kind(ErrorKind::InvalidArgument, [] { EventTrigger({0.105, 0.01, lam(1.0)}, 0.01); }));
  EventTrigger trig({0.1, 0.0, lam(1.0)}, 0.01);
  CHECK(trig.waiting_steps() == 10);
  CHECK(trig.update(0, v1(1.0)));
  for (long n = 1; n < 10; ++n) CHECK_FALSE(trig.update(n, v1(100.0 * n)));
  CHECK(trig.update(10, v1(1.0)));
  CHECK(trig.last_step() == 10);
}

TEST_CASE("a larger epsilon never produces more events on the same signal", "[etc][property]") {
  Vec ys(2000);
  for (int n = 0; n < ys.size(); ++n) ys[n] = std::exp(-0.002 * n) * std::sin(0.05 * n) + 0.3 * std::cos(0.011 * n);
  long prev = -1;
  for (double eps : {0.0, 0.001, 0.01, 0.1, 0.5}) {
    EventTrigger trig({0.1, eps, lam(2.0)}, 0.01);
    long count = 0;
    for (int n = 0; n < ys.size(); ++n) count += trig.update(n, v1(ys[n]));
    if (prev >= 0) CHECK(count <= prev);
    prev = count;
  }
}

TEST_CASE("closed-loop simulation properties", "[etc]") {
  const SlowSystem sys = example1_slow();
  const ClosedLoopModel model = make_closed_loop_model(sys, table1_network());
  Mat K(2, 1);
  K << -1.0, 0.5;
  const TriggerConfig tc{0.11, 0.01, lam(1.0)};
  EtcSimConfig sim;
  sim.T = 3.0;

  SECTION("zero state without disturbance stays zero") {
    sim.xi0 = Vec::Zero(2);
    const ClosedLoopTrace tr = simulate_switching(model, K, tc, Disturbance(), sim);
    CHECK(tr.xi.cwiseAbs().maxCoeff() == 0.0);
    CHECK(tr.u.cwiseAbs().maxCoeff() == 0.0);
    CHECK(hinf_energy_ratio([&] {
      ClosedLoopTrace t2 = simulate_switching(model, K, tc, Disturbance(DisturbanceKind::Constant, 0.1), sim);
      t2.y.setZero();
      return t2;
    }()) == 0.0);
    CHECK(throws_kind(ErrorKind::UndefinedRatio, [&] { (void)hinf_energy_ratio(tr); }));
  }

  SECTION("the input is held between events and gaps respect h") {
    sim.xi0 = (Vec(2) << -0.4, 0.1).finished();
    const ClosedLoopTrace tr = simulate_switching(model, K, tc, Disturbance(DisturbanceKind::DecayingSine, 0.1), sim);
    CHECK(tr.dt == Catch::Approx(0.0011));
    for (Eigen::Index i = 1; i < tr.steps(); ++i)
      if (!tr.fired[i]) CHECK((tr.u.row(i) - tr.u.row(i - 1)).norm() == 0.0);
    const TriggerStats st = count_triggers(tr);
    CHECK(st.count >= 1);
    CHECK(st.min_gap >= 0.11 - 1e-9);
  }

  SECTION("a fabricated short gap is an assertion failure") {
    sim.xi0 = (Vec(2) << -0.4, 0.1).finished();
    ClosedLoopTrace tr = simulate_switching(model, K, tc, Disturbance(), sim);
    tr.fired.assign(tr.fired.size(), 0);
    tr.fired[0] = tr.fired[5] = 1;
    tr.trigger_times = {tr.times[0], tr.times[5]};
    CHECK(throws_kind(ErrorKind::Assertion, [&] { (void)count_triggers(tr); }));
  }

  SECTION("static trigger with eps = 0 chatters and is flagged") {
    sim.xi0 = (Vec(2) << -0.4, 0.1).finished();
    sim.dt = 1e-3;
    const ClosedLoopTrace tr = simulate_static(model, K, 0.0, lam(1.0), Disturbance(), sim);
    CHECK(tr.zeno);
    CHECK_FALSE(tr.notes.empty());
  }

  SECTION("a switching trigger needs a positive waiting time") {
    sim.xi0 = Vec::Zero(2);
    CHECK(throws_kind(ErrorKind::InvalidArgument,
                      [&] { (void)simulate_switching(model, K, {0.0, 0.01, lam(1.0)}, Disturbance(), sim); }));
  }
}
