#pragma once

#include "pdeetc/disturbance.hpp"
#include "pdeetc/galerkin.hpp"
#include "pdeetc/mnn.hpp"
#include "pdeetc/pde_sim.hpp"
#include "pdeetc/synthesis.hpp"

#include <optional>
#include <string>
#include <vector>

namespace pdeetc {

struct TriggerConfig {
  double h = 0.11;  // waiting time; 0 gives the static trigger
  double epsilon = 0.01;
  Mat Lambda;
  void validate(bool switching) const;
};

/// Continuous-time form of the rule: silent while t < t_k + h, then fires iff
/// (y - y_k)' Lambda (y - y_k) >= eps * y' Lambda y. With eps > 0 a zero output
/// never fires; with eps = 0 the "both sides zero" case fires.
bool check_trigger(const TriggerConfig& cfg, double t, double t_k, const Vec& y, const Vec& y_k);

struct SwitchingController {
  Mat K;       // n_u x n_y
  Mat C;       // n_y x m
  Vec y_held;  // y(t_k)
  double t_k = 0.0;
  double h = 0.0;

  /// chi = 1 on [t_k, t_k + h)
  int chi(double t) const { return t < t_k + h ? 1 : 0; }
};

/// u = -K y(t_k).
Vec control_law(const SwitchingController& ctrl);

/// The two printed branches evaluated literally: K C (int_{t_k}^t xi_dot - xi(t))
/// with the integral written as xi(t) - xi(t_k), and -K (e + C xi(t)) with
/// e = y(t_k) - y(t). Both equal control_law(ctrl).
struct ControlBranches {
  Vec waiting;
  Vec event;
};
ControlBranches control_law_branches(const SwitchingController& ctrl, const Vec& xi_t, const Vec& xi_tk);

/// Step-counting trigger shared by the slow and the full-PDE loops.
class EventTrigger {
 public:
  EventTrigger(TriggerConfig cfg, double dt);
  /// Step n, output y; returns true when an event fires (always at n = 0).
  bool update(long n, const Vec& y);
  const Vec& held() const { return y_k_; }
  long last_step() const { return last_; }
  int chi(long n) const { return n - last_ < h_steps_ ? 1 : 0; }
  long waiting_steps() const { return h_steps_; }
  /// Consecutive events one step apart (static mode Zeno guard).
  int back_to_back() const { return back_to_back_; }

 private:
  TriggerConfig cfg_;
  long h_steps_ = 0;
  long last_ = -1;
  int back_to_back_ = 0;
  Vec y_k_;
};

/// Slow closed-loop model. When `true_fs` is set the network is replaced by the
/// true projected nonlinearity (i.e. the identification residual is included).
struct ClosedLoopModel {
  Mat A, B2, B1, C;
  Mnn net;
  SlowMap true_fs;

  int m() const { return static_cast<int>(A.rows()); }
  Vec rhs(const Vec& xi, const Vec& u, const Vec& d) const;
};

ClosedLoopModel make_closed_loop_model(const SlowSystem& sys, const Mnn& net, SlowMap true_fs = nullptr);

struct EtcSimConfig {
  double dt = 0.0;  // 0 -> h / 100
  double T = 10.0;
  Vec xi0;
  double overflow = 1e6;
  int zeno_limit = 100;
};

struct ClosedLoopTrace {
  Vec times;
  Mat xi, xi_dot, u, y, e, d;  // one row per step
  std::vector<int> chi;
  std::vector<int> fired;
  std::vector<double> trigger_times;
  double h = 0.0;
  double epsilon = 0.0;
  double dt = 0.0;
  bool switching = true;
  bool zeno = false;
  std::string disturbance;
  std::vector<std::string> notes;

  Eigen::Index steps() const { return times.size(); }
};

ClosedLoopTrace simulate_switching(const ClosedLoopModel& model, const Mat& K, const TriggerConfig& cfg,
                                   const Disturbance& disturbance, const EtcSimConfig& sim);

/// Same loop with no waiting window; stops with `zeno` set after
/// `zeno_limit` consecutive one-step events.
ClosedLoopTrace simulate_static(const ClosedLoopModel& model, const Mat& K, double epsilon, const Mat& Lambda,
                                const Disturbance& disturbance, const EtcSimConfig& sim);

struct FullPdeResult {
  FieldTrace field;
  ClosedLoopTrace loop;     // per-step t, y, u, e, chi, fired, d (xi left empty)
  Mat slow_projection;      // stored field steps x m
};

FullPdeResult simulate_switching_full_pde(const PlantModel& plant, const ModalBasis& basis, const Mat& K,
                                          const TriggerConfig& cfg, const Disturbance& disturbance,
                                          const PdeSimConfig& sim);

struct TriggerStats {
  long count = 0;
  double min_gap = 0.0;
  double mean_gap = 0.0;
  double max_gap = 0.0;
};

/// Counts events; in switching mode a gap shorter than h raises an assertion error.
TriggerStats count_triggers(const ClosedLoopTrace& trace);

struct LyapunovReport {
  Vec times;
  Vec V, V1, V2, V3, V4;
  double warmup_end = 0.0;
  long increases = 0;           // steps after warm-up where V grew beyond tolerance
  double max_increase = 0.0;    // largest such growth, relative to V(0)
  bool non_increasing = true;
};

/// V(t) along a trace; xi(t - tau) is xi(t_k) and the (h - tau) weighted terms
/// vanish outside the waiting window.
LyapunovReport lyapunov_evaluate(const ClosedLoopTrace& trace, const ControllerCertificate& cert,
                                 double tolerance = 1e-6);

/// int y'y / int d'd (trapezoid).
double hinf_energy_ratio(const ClosedLoopTrace& trace);

void write_closed_loop_csv(const ClosedLoopTrace& trace, const std::string& path);
std::string trigger_summary(const ClosedLoopTrace& trace);

}  // namespace pdeetc
