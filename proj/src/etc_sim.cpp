#include "pdeetc/etc_sim.hpp"

#include "pdeetc/error.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

namespace pdeetc {

void TriggerConfig::validate(bool switching) const {
  if (switching && !(h > 0.0)) throw Error(ErrorKind::InvalidArgument, "switching trigger needs h > 0");
  if (!(h >= 0.0)) throw Error(ErrorKind::InvalidArgument, "h must be non-negative");
  if (!(epsilon >= 0.0)) throw Error(ErrorKind::InvalidArgument, "epsilon must be non-negative");
  if (Lambda.rows() == 0 || Lambda.rows() != Lambda.cols())
    throw Error(ErrorKind::InvalidArgument, "Lambda must be a non-empty square matrix");
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (Lambda + Lambda.transpose()));
  if (!(es.eigenvalues().minCoeff() > 0.0)) throw Error(ErrorKind::InvalidArgument, "Lambda must be positive definite");
}

namespace {

bool rule(const TriggerConfig& cfg, const Vec& y, const Vec& y_k) {
  const Vec e = y - y_k;
  const double lhs = e.dot(cfg.Lambda * e);
  const double rhs = cfg.epsilon * y.dot(cfg.Lambda * y);
  if (cfg.epsilon > 0.0 && lhs == 0.0 && rhs == 0.0) return false;
  return lhs >= rhs;
}

}  // namespace

bool check_trigger(const TriggerConfig& cfg, double t, double t_k, const Vec& y, const Vec& y_k) {
  if (t < t_k + cfg.h) return false;
  return rule(cfg, y, y_k);
}

Vec control_law(const SwitchingController& ctrl) { return -ctrl.K * ctrl.y_held; }

ControlBranches control_law_branches(const SwitchingController& ctrl, const Vec& xi_t, const Vec& xi_tk) {
  ControlBranches b;
  const Vec integral = xi_t - xi_tk;
  b.waiting = ctrl.K * (ctrl.C * (integral - xi_t));
  const Vec e = ctrl.y_held - ctrl.C * xi_t;
  b.event = -ctrl.K * (e + ctrl.C * xi_t);
  return b;
}

EventTrigger::EventTrigger(TriggerConfig cfg, double dt) : cfg_(std::move(cfg)) {
  if (!(dt > 0.0)) throw Error(ErrorKind::InvalidArgument, "time step must be positive");
  h_steps_ = std::lround(cfg_.h / dt);
  if (std::abs(h_steps_ * dt - cfg_.h) > 1e-9 * std::max(1.0, cfg_.h))
    throw Error(ErrorKind::InvalidArgument, "waiting time h must be an integer multiple of the time step");
}

bool EventTrigger::update(long n, const Vec& y) {
  bool fire = false;
  if (last_ < 0)
    fire = true;
  else if (n - last_ >= h_steps_ && n > last_)
    fire = rule(cfg_, y, y_k_);
  if (fire) {
    back_to_back_ = (last_ >= 0 && n - last_ == 1) ? back_to_back_ + 1 : 0;
    last_ = n;
    y_k_ = y;
  }
  return fire;
}

Vec ClosedLoopModel::rhs(const Vec& xi, const Vec& u, const Vec& d) const {
  Vec out = A * xi + B2 * u;
  out += true_fs ? true_fs(xi) : forward(net, xi);
  if (B1.cols() > 0) out += B1 * d;
  return out;
}

ClosedLoopModel make_closed_loop_model(const SlowSystem& sys, const Mnn& net, SlowMap true_fs) {
  sys.validate();
  net.validate();
  if (net.m() != sys.m()) throw Error(ErrorKind::InvalidArgument, "network dimension does not match the slow model");
  return {sys.A, sys.B2, sys.B1, sys.C, net, std::move(true_fs)};
}

namespace {

struct Recorder {
  std::vector<double> t;
  std::vector<Vec> xi, xi_dot, u, y, e, d;
  std::vector<int> chi, fired;

  void push(double tt, const Vec& x, const Vec& xd, const Vec& uu, const Vec& yy, const Vec& ee, const Vec& dd,
            int c, int f) {
    t.push_back(tt);
    xi.push_back(x);
    xi_dot.push_back(xd);
    u.push_back(uu);
    y.push_back(yy);
    e.push_back(ee);
    d.push_back(dd);
    chi.push_back(c);
    fired.push_back(f);
  }

  static Mat stack(const std::vector<Vec>& rows) {
    if (rows.empty()) return Mat();
    Mat m(static_cast<Eigen::Index>(rows.size()), rows.front().size());
    for (size_t i = 0; i < rows.size(); ++i) m.row(static_cast<Eigen::Index>(i)) = rows[i].transpose();
    return m;
  }

  void fill(ClosedLoopTrace& tr) const {
    tr.times = Eigen::Map<const Vec>(t.data(), static_cast<Eigen::Index>(t.size()));
    tr.xi = stack(xi);
    tr.xi_dot = stack(xi_dot);
    tr.u = stack(u);
    tr.y = stack(y);
    tr.e = stack(e);
    tr.d = stack(d);
    tr.chi = chi;
    tr.fired = fired;
    tr.trigger_times.clear();
    for (size_t i = 0; i < fired.size(); ++i)
      if (fired[i]) tr.trigger_times.push_back(t[i]);
  }
};

ClosedLoopTrace run_loop(const ClosedLoopModel& model, const Mat& K, const TriggerConfig& cfg,
                         const Disturbance& disturbance, const EtcSimConfig& sim, double dt, bool switching) {
  const int m = model.m();
  if (K.rows() != model.B2.cols() || K.cols() != model.C.rows())
    throw Error(ErrorKind::InvalidArgument, "gain must be n_u x n_y");
  if (sim.xi0.size() != m) throw Error(ErrorKind::InvalidArgument, "initial slow state has the wrong size");
  if (model.B1.cols() > 0 && disturbance.channels() != model.B1.cols())
    throw Error(ErrorKind::InvalidArgument, "disturbance channel count does not match B1");
  if (!(sim.T > 0.0)) throw Error(ErrorKind::InvalidArgument, "horizon must be positive");

  EventTrigger trig(cfg, dt);
  ClosedLoopTrace tr;
  tr.h = cfg.h;
  tr.epsilon = cfg.epsilon;
  tr.dt = dt;
  tr.switching = switching;
  tr.disturbance = disturbance.describe();

  const long n_steps = std::lround(sim.T / dt);
  const Vec no_d = Vec::Zero(model.B1.cols());
  auto dist = [&](double t) { return model.B1.cols() > 0 ? disturbance(t) : no_d; };
  Recorder rec;
  Vec xi = sim.xi0;
  for (long n = 0; n <= n_steps; ++n) {
    const double t = n * dt;
    const Vec y = model.C * xi;
    const bool fired = trig.update(n, y);
    const Vec u = -K * trig.held();
    const Vec d = dist(t);
    const Vec k1 = model.rhs(xi, u, d);
    rec.push(t, xi, k1, u, y, trig.held() - y, d, trig.chi(n), fired ? 1 : 0);
    if (!switching && trig.back_to_back() >= sim.zeno_limit) {
      tr.zeno = true;
      tr.notes.push_back("static trigger fired on " + std::to_string(sim.zeno_limit) +
                         " consecutive steps (Zeno-like chattering); run aborted at t=" + std::to_string(t));
      break;
    }
    if (n == n_steps) break;
    const Vec dm = dist(t + 0.5 * dt);
    const Vec k2 = model.rhs(xi + 0.5 * dt * k1, u, dm);
    const Vec k3 = model.rhs(xi + 0.5 * dt * k2, u, dm);
    const Vec k4 = model.rhs(xi + dt * k3, u, dist(t + dt));
    xi += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!xi.allFinite())
      throw Error(ErrorKind::Solver, "non-finite slow state at t=" + std::to_string(t + dt));
    if (xi.cwiseAbs().maxCoeff() > sim.overflow)
      throw Error(ErrorKind::Divergence, "slow state exceeded overflow guard at t=" + std::to_string(t + dt));
  }
  rec.fill(tr);
  return tr;
}

}  // namespace

ClosedLoopTrace simulate_switching(const ClosedLoopModel& model, const Mat& K, const TriggerConfig& cfg,
                                   const Disturbance& disturbance, const EtcSimConfig& sim) {
  cfg.validate(true);
  const double dt = sim.dt > 0.0 ? sim.dt : cfg.h / 100.0;
  if (dt > cfg.h / 20.0 + 1e-15) throw Error(ErrorKind::InvalidArgument, "time step must resolve the waiting window (dt <= h/20)");
  return run_loop(model, K, cfg, disturbance, sim, dt, true);
}

ClosedLoopTrace simulate_static(const ClosedLoopModel& model, const Mat& K, double epsilon, const Mat& Lambda,
                                const Disturbance& disturbance, const EtcSimConfig& sim) {
  TriggerConfig cfg{0.0, epsilon, Lambda};
  cfg.validate(false);
  if (!(sim.dt > 0.0)) throw Error(ErrorKind::InvalidArgument, "static trigger simulation needs an explicit time step");
  return run_loop(model, K, cfg, disturbance, sim, sim.dt, false);
}

FullPdeResult simulate_switching_full_pde(const PlantModel& plant, const ModalBasis& basis, const Mat& K,
                                          const TriggerConfig& cfg, const Disturbance& disturbance,
                                          const PdeSimConfig& sim) {
  cfg.validate(true);
  if (!basis.separable) throw Error(ErrorKind::InvalidArgument, "full-PDE loop needs a slow/fast separable basis");
  if (K.rows() != static_cast<Eigen::Index>(plant.b2.size()) || K.cols() != static_cast<Eigen::Index>(plant.cbar.size()))
    throw Error(ErrorKind::InvalidArgument, "gain must be n_u x n_y");
  EventTrigger trig(cfg, sim.dt);
  Recorder rec;
  const Vec none;
  auto controller = [&](double t, const Vec& y) -> Vec {
    const long n = std::lround(t / sim.dt);
    const bool fired = trig.update(n, y);
    const Vec u = -K * trig.held();
    const Vec d = plant.b1.empty() ? Vec() : disturbance(t);
    rec.push(t, none, none, u, y, trig.held() - y, d, trig.chi(n), fired ? 1 : 0);
    return u;
  };
  FullPdeResult out;
  out.field = simulate(plant, controller, disturbance, sim);
  rec.fill(out.loop);
  out.loop.xi = Mat();
  out.loop.xi_dot = Mat();
  out.loop.h = cfg.h;
  out.loop.epsilon = cfg.epsilon;
  out.loop.dt = sim.dt;
  out.loop.switching = true;
  out.loop.disturbance = disturbance.describe();
  out.loop.notes = out.field.notes;
  if (sim.store_fields) {
    out.slow_projection.resize(out.field.steps(), basis.m);
    for (Eigen::Index r = 0; r < out.field.steps(); ++r)
      out.slow_projection.row(r) =
          project_field(out.field.fields.row(r).transpose(), out.field.grid, basis, basis.m).transpose();
  }
  return out;
}

TriggerStats count_triggers(const ClosedLoopTrace& trace) {
  TriggerStats s;
  s.count = static_cast<long>(trace.trigger_times.size());
  if (s.count < 2) return s;
  s.min_gap = std::numeric_limits<double>::infinity();
  double sum = 0.0;
  for (size_t i = 1; i < trace.trigger_times.size(); ++i) {
    const double g = trace.trigger_times[i] - trace.trigger_times[i - 1];
    s.min_gap = std::min(s.min_gap, g);
    s.max_gap = std::max(s.max_gap, g);
    sum += g;
  }
  s.mean_gap = sum / static_cast<double>(s.count - 1);
  if (trace.switching && s.min_gap < trace.h - 1e-9)
    throw Error(ErrorKind::Assertion, "inter-event time " + std::to_string(s.min_gap) + " shorter than h");
  return s;
}

LyapunovReport lyapunov_evaluate(const ClosedLoopTrace& trace, const ControllerCertificate& cert, double tolerance) {
  LyapunovReport rep;
  const Eigen::Index n = trace.steps();
  const int m = cert.m();
  if (n == 0) return rep;
  if (trace.xi.cols() != m) throw Error(ErrorKind::InvalidArgument, "trace and certificate dimensions differ");
  if (cert.params.q.size() != cert.params.n_h() || cert.params.r.size() != cert.params.n_h())
    throw Error(ErrorKind::InvalidArgument, "certificate lacks activation parameters q, r");
  const auto& p = cert.params;
  const double h = trace.h;
  const double alpha = p.alpha;
  const Mat S1 = 0.5 * (cert.Q1 + cert.Q1.transpose());
  const Mat S2 = 0.5 * (cert.Q2 + cert.Q2.transpose());
  const Mat Q1h = S1;                 // (Q1/2 + *)
  const Mat Q21 = S1 - 2.0 * S2;      // ((Q1 - 2Q2)/2 + *)
  const Mat Qx = cert.Q2 - cert.Q1;
  const Vec spread = p.sector.g_max - p.sector.g_min;
  const Vec omega = cert.Omega.diagonal();
  rep.times = trace.times;
  rep.V.resize(n);
  rep.V1.resize(n);
  rep.V2.resize(n);
  rep.V3.resize(n);
  rep.V4.resize(n);
  Vec xi_k = trace.xi.row(0).transpose();
  double t_k = trace.times[0];
  double integral = 0.0;
  const double decay = std::exp(-2.0 * alpha * trace.dt);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Vec xi = trace.xi.row(i).transpose();
    const double t = trace.times[i];
    const Vec xd = trace.xi_dot.row(i).transpose();
    const double g = xd.dot(cert.U * xd);
    if (trace.fired[static_cast<size_t>(i)]) {
      xi_k = xi;
      t_k = t;
      integral = 0.0;
    } else if (i > 0) {
      const Vec xdp = trace.xi_dot.row(i - 1).transpose();
      integral = decay * integral + 0.5 * trace.dt * (g + decay * xdp.dot(cert.U * xdp));
    }
    Vec rho1(2 * m);
    rho1 << xi, xi_k;
    rep.V1[i] = rho1.dot(cert.P * rho1);
    const double w = std::max(0.0, h - (t - t_k));
    rep.V2[i] = w * integral;
    rep.V3[i] = w * (xi.dot(Q1h * xi) + xi_k.dot(Q21 * xi_k) + 2.0 * xi.dot(Qx * xi_k));
    double v4 = 0.0;
    const Vec s = cert.params.V * xi;
    for (Eigen::Index j = 0; j < s.size(); ++j)
      v4 += 2.0 * omega[j] * spread[j] * activation_integral(s[j], p.q[j], p.r[j]);
    rep.V4[i] = v4;
    rep.V[i] = rep.V1[i] + rep.V2[i] + rep.V3[i] + rep.V4[i];
  }
  rep.warmup_end = trace.times[0] + h;
  const double tol = tolerance * std::max(std::abs(rep.V[0]), 1e-300);
  for (Eigen::Index i = 1; i < n; ++i) {
    if (trace.times[i] < rep.warmup_end || trace.fired[static_cast<size_t>(i)]) continue;
    const double inc = rep.V[i] - rep.V[i - 1];
    if (inc > tol) {
      ++rep.increases;
      rep.max_increase = std::max(rep.max_increase, inc / std::max(std::abs(rep.V[0]), 1e-300));
    }
  }
  rep.non_increasing = rep.increases == 0;
  return rep;
}

double hinf_energy_ratio(const ClosedLoopTrace& trace) {
  double ey = 0.0, ed = 0.0;
  for (Eigen::Index i = 1; i < trace.steps(); ++i) {
    const double dt = trace.times[i] - trace.times[i - 1];
    ey += 0.5 * dt * (trace.y.row(i).squaredNorm() + trace.y.row(i - 1).squaredNorm());
    if (trace.d.cols() > 0) ed += 0.5 * dt * (trace.d.row(i).squaredNorm() + trace.d.row(i - 1).squaredNorm());
  }
  if (!(ed > 0.0)) throw Error(ErrorKind::UndefinedRatio, "disturbance energy is zero");
  return ey / ed;
}

void write_closed_loop_csv(const ClosedLoopTrace& tr, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path);
  out << std::setprecision(10);
  out << "t";
  for (Eigen::Index j = 0; j < tr.xi.cols(); ++j) out << ",xi_" << j + 1;
  for (Eigen::Index j = 0; j < tr.u.cols(); ++j) out << ",u_" << j + 1;
  for (Eigen::Index j = 0; j < tr.y.cols(); ++j) out << ",y_" << j + 1;
  out << ",chi,fired";
  for (Eigen::Index j = 0; j < tr.e.cols(); ++j) out << ",e_" << j + 1;
  out << "\n";
  for (Eigen::Index i = 0; i < tr.steps(); ++i) {
    out << tr.times[i];
    for (Eigen::Index j = 0; j < tr.xi.cols(); ++j) out << "," << tr.xi(i, j);
    for (Eigen::Index j = 0; j < tr.u.cols(); ++j) out << "," << tr.u(i, j);
    for (Eigen::Index j = 0; j < tr.y.cols(); ++j) out << "," << tr.y(i, j);
    out << "," << tr.chi[static_cast<size_t>(i)] << "," << tr.fired[static_cast<size_t>(i)];
    for (Eigen::Index j = 0; j < tr.e.cols(); ++j) out << "," << tr.e(i, j);
    out << "\n";
  }
}

std::string trigger_summary(const ClosedLoopTrace& trace) {
  const TriggerStats s = count_triggers(trace);
  std::ostringstream os;
  os << std::setprecision(6) << "mode=" << (trace.switching ? "switching" : "static") << " count=" << s.count
     << " min_gap=" << s.min_gap << " mean_gap=" << s.mean_gap << " max_gap=" << s.max_gap << " h=" << trace.h
     << " epsilon=" << trace.epsilon << " dt=" << trace.dt << " disturbance=\"" << trace.disturbance << "\"";
  if (trace.zeno) os << " zeno=1";
  return os.str();
}

}  // namespace pdeetc
