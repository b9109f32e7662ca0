// Acceptance run: one PASS/FAIL line per criterion, details indented below.
// Exit status is nonzero when any criterion fails.
#include "pdeetc/config.hpp"
#include "pdeetc/error.hpp"
#include "pdeetc/examples.hpp"
#include "pdeetc/pipeline.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <Eigen/Eigenvalues>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

using namespace pdeetc;
namespace fs = std::filesystem;

#ifndef PDEETC_SOURCE_DIR
#define PDEETC_SOURCE_DIR "."
#endif

namespace {

// pinned tolerances
constexpr double kEigTolFd = 1e-4;
constexpr double kProjTol = 1e-8;
constexpr double kMseMax = 1e-4;
constexpr double kJacTol = 1e-5;
constexpr double kDeltaMax = 0.2;
constexpr double kMargin = 1e-6;
constexpr double kCountBand = 0.30;
constexpr double kR2Min = 0.9;
constexpr double kGammaLo = 0.3, kGammaHi = 1.0;
constexpr double kTrackTol = 0.10;
constexpr double kC1Seconds = 5.0, kC3Seconds = 60.0, kC4Seconds = 120.0;

const double pi = 3.141592653589793;

struct Criterion {
  int id;
  std::string title;
  bool pass = true;
  std::vector<std::string> lines;

  void require(bool ok, const std::string& what) {
    pass &= ok;
    lines.push_back(std::string(ok ? "ok   " : "FAIL ") + what);
  }
  void note(const std::string& what) { lines.push_back("     " + what); }
};

std::string num(double v, int prec = 6) {
  std::ostringstream os;
  os.precision(prec);
  os << v;
  return os.str();
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double gk(const std::function<double(double)>& f, double a, double b) {
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 15, 1e-14);
}

double max_eig(const Mat& m) {
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (m + m.transpose()), Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Shared Example 1 state, built once.
struct Example {
  ExperimentConfig cfg;
  PlantModel plant;
  BasisPtr basis;
  SlowSystem sys;
  SlowMap fs_true;
  Mnn net;
  SynthesisParams params;
  SynthesisOptions opt;
  Vec xi0;
  Disturbance dist;

  explicit Example(const std::string& file) {
    cfg = load_config(std::string(PDEETC_SOURCE_DIR) + "/configs/" + file);
    plant = build_plant(cfg);
    basis = build_basis(cfg);
    sys = assemble_slow_system(basis, plant.b2, plant.b1, plant.cbar);
    fs_true = galerkin_nonlinearity(plant.f, basis);
    net = synthesis_network(cfg, nullptr);
    params = synthesis_params(cfg, sys, net, cfg.synthesis.delta);
    opt = synthesis_options(cfg);
    xi0 = slow_initial_state(cfg, plant, *basis);
    dist = build_disturbance(cfg, sys.n_d());
  }

  EtcSimConfig sim() const {
    EtcSimConfig s;
    s.T = cfg.simulation.T;
    s.dt = cfg.simulation.dt;
    s.xi0 = xi0;
    return s;
  }
  TriggerConfig trigger(const ControllerCertificate& c) const {
    return {cfg.synthesis.h, cfg.synthesis.epsilon, c.params.Lambda};
  }
  PdeSimConfig pde() const {
    PdeSimConfig pc;
    pc.grid_n = cfg.simulation.pde_grid_n;
    pc.dt = cfg.simulation.pde_dt;
    pc.T = cfg.simulation.T;
    pc.stride = cfg.simulation.pde_stride;
    return pc;
  }
};

// Relaxed and exact corners at the certificate point: LMI < 0 must imply BMI < 0.
bool schur_consistent(const ControllerCertificate& c, PhiVariant variant, std::string& detail) {
  const PhiVariables v = c.variables();
  bool ok = true;
  double worst_lmi = -1e300, worst_bmi = -1e300;
  for (int k = 1; k <= 4; ++k) {
    const double l = max_eig(assemble_lmi_phi_tilde(k, c.params, v, variant).matrix.constant());
    const double b = max_eig(assemble_bmi_phi(k, c.params, v, variant).matrix.constant());
    worst_lmi = std::max(worst_lmi, l);
    worst_bmi = std::max(worst_bmi, b);
    if (l < 0.0 && !(b < 0.0)) ok = false;
  }
  detail = "max eig relaxed " + num(worst_lmi) + ", exact " + num(worst_bmi);
  return ok && worst_bmi < 0.0;
}

void c1(Criterion& c) {
  const auto t0 = std::chrono::steady_clock::now();
  const ModalBasis a = analytic_dirichlet_basis(1.0, {0.0, pi}, 2);
  c.require(a.eigenvalues[0] == -1.0 && a.eigenvalues[1] == -4.0,
            "analytic lambda = (" + num(a.eigenvalues[0], 17) + ", " + num(a.eigenvalues[1], 17) + ") exactly");
  SturmLiouvilleSpec spec;
  spec.domain = {0.0, pi};
  spec.z2 = [](double) { return 1.0; };
  const ModalBasis f = eigensolve_sturm_liouville(spec, 2000, 2);
  const double err = std::max(std::abs(f.eigenvalues[0] + 1.0), std::abs(f.eigenvalues[1] + 4.0));
  c.require(err <= kEigTolFd, "FD (grid 2000) max |lambda - exact| = " + num(err) + " <= " + num(kEigTolFd));
  const double t = seconds_since(t0);
  c.require(t < kC1Seconds, "runtime " + num(t, 3) + " s < " + num(kC1Seconds) + " s");
}

void c2(Criterion& c, const Example& ex) {
  const ModalBasis& b = *ex.basis;
  double worst = 0.0;
  for (int i = 0; i < 2; ++i) {
    const double ci = gk([&](double p) { return ex.plant.cbar[0](p) * b.phi(i, p); }, 0.0, pi);
    const double b1 = gk([&](double p) { return ex.plant.b1[0](p) * b.phi(i, p); }, 0.0, pi);
    worst = std::max({worst, std::abs(ci - ex.sys.C(0, i)), std::abs(b1 - ex.sys.B1(i, 0))});
    for (int k = 0; k < 2; ++k) {
      const double b2 = gk([&](double p) { return ex.plant.b2[k](p) * b.phi(i, p); }, 0.0, pi);
      worst = std::max(worst, std::abs(b2 - ex.sys.B2(i, k)));
    }
  }
  c.require(std::abs(ex.sys.C(0, 0) - 1.0) <= kProjTol && std::abs(ex.sys.C(0, 1) - 1.0) <= kProjTol,
            "C_s = [" + num(ex.sys.C(0, 0), 12) + ", " + num(ex.sys.C(0, 1), 12) + "]");
  c.require(std::abs(ex.sys.B1(0, 0) - 2.0 * std::sqrt(2.0 / pi)) <= kProjTol,
            "B1_s[0] = " + num(ex.sys.B1(0, 0), 12) + " vs 2 sqrt(2/pi) = " + num(2.0 * std::sqrt(2.0 / pi), 12));
  c.require(worst <= kProjTol, "every projected entry vs adaptive quadrature: max diff " + num(worst));
  std::ostringstream os;
  os << "quadrature B2_s = [" << ex.sys.B2.row(0) << "; " << ex.sys.B2.row(1) << "] (printed [-1.5 -2.5; -3 0])";
  c.note(os.str());
  c.note("quadrature B1_s[1] = " + num(ex.sys.B1(1, 0), 12) + " (printed 2 sqrt(2/pi) = " +
         num(2.0 * std::sqrt(2.0 / pi), 12) + "); quadrature values are used");
}

IdentificationResult c3(Criterion& c, const Example& ex) {
  const auto t0 = std::chrono::steady_clock::now();
  const IdentificationResult r = identify(ex.cfg, ex.plant, ex.basis, ex.sys);
  const double t = seconds_since(t0);
  c.require(r.mse < kMseMax, "LM mse " + num(r.mse) + " < " + num(kMseMax) + " (" + std::to_string(r.samples) +
                                 " samples, " + std::to_string(r.lm.iterations) + " iterations)");
  c.require(r.bp_loss > r.lm_loss, "BP loss " + num(r.bp_loss) + " > LM loss " + num(r.lm_loss) + " at equal iterations");
  c.require(r.delta < kDeltaMax, "delta estimate " + num(r.delta) + " < " + num(kDeltaMax) + " (printed 0.0509)");

  // analytic Jacobian vs central differences on a data subset
  const auto& id = ex.cfg.identification;
  SlowModelSampler s(ex.sys.A, ex.fs_true);
  const Vec lo = Eigen::Map<const Vec>(id.region_lo.data(), 2), hi = Eigen::Map<const Vec>(id.region_hi.data(), 2);
  const TrainingSet data = generate_targets(s, lo, hi, 0.5, id.dTs, ex.sys.A);
  const Mat J = residual_jacobian(r.net, data);
  const Vec th = pack_parameters(r.net);
  double worst = 0.0;
  for (Eigen::Index k = 0; k < th.size(); ++k) {
    const double hstep = 1e-6 * std::max(1.0, std::abs(th[k]));
    Vec tp = th, tm = th;
    tp[k] += hstep;
    tm[k] -= hstep;
    const Vec fd = (residuals(unpack_parameters(r.net, tp), data) - residuals(unpack_parameters(r.net, tm), data)) /
                   (2.0 * hstep);
    worst = std::max(worst, (fd - J.col(k)).norm() / std::max(1.0, J.col(k).norm()));
  }
  c.require(worst <= kJacTol, "Jacobian vs finite differences: max relative diff " + num(worst));
  c.require(t < kC3Seconds, "runtime " + num(t, 3) + " s < " + num(kC3Seconds) + " s");
  return r;
}

ControllerCertificate c4(Criterion& c, const Example& ex) {
  const auto t0 = std::chrono::steady_clock::now();
  const ControllerCertificate cert = synthesize_gain(ex.params, ex.opt);
  const double t = seconds_since(t0);
  const VerifyReport vr = verify_certificate(cert, VerifyMode::Stability);
  double worst = -1e300;
  for (const auto& ch : vr.checks) worst = std::max(worst, ch.negative ? ch.eigenvalue : -ch.eigenvalue);
  c.require(vr.pass && cert.params.margin >= kMargin,
            "certificate verified, margin " + num(cert.params.margin) + ", worst signed eigenvalue " + num(worst));
  c.note("beta1 " + num(cert.params.beta1) + ", Lambda " + num(cert.params.Lambda(0, 0)) + ", K = [" +
         num(cert.K(0, 0)) + ", " + num(cert.K(1, 0)) + "]");
  for (const auto& l : cert.log) c.note("synthesis: " + l);
  const ClosedLoopModel model = make_closed_loop_model(ex.sys, ex.net, ex.fs_true);
  const ClosedLoopTrace tr = simulate_switching(model, cert.K, ex.trigger(cert), ex.dist, ex.sim());
  double sup = 0.0;
  for (Eigen::Index i = 0; i < tr.steps(); ++i)
    if (tr.times[i] >= 5.0) sup = std::max(sup, tr.xi.row(i).norm());
  const double bound = ultimate_bound(cert, ex.cfg.simulation.D1);
  c.require(sup < bound, "sup |xi_s| for t >= 5 = " + num(sup) + " < ultimate bound " + num(bound));
  c.require(t < kC4Seconds, "synthesis runtime " + num(t, 3) + " s < " + num(kC4Seconds) + " s");
  return cert;
}

void c5(Criterion& c, const Example& ex, const ControllerCertificate& cert) {
  const ClosedLoopModel model = make_closed_loop_model(ex.sys, ex.net, ex.fs_true);
  EtcSimConfig sim = ex.sim();
  sim.T = 10.0;
  const std::vector<double> hs{0.055, 0.11};
  const double paper_sw[] = {127, 77}, paper_st[] = {216, 224};
  try {
    const auto rows = compare_triggers(model, cert.K, ex.cfg.synthesis.epsilon, cert.params.Lambda, ex.dist, sim, hs);
    c.require(true, "min inter-event time >= h on every switching run (asserted)");
    for (size_t i = 0; i < rows.size(); ++i) {
      const auto& r = rows[i];
      c.require(r.switching.count < r.static_mode.count,
                "h=" + num(r.h) + ": switching " + std::to_string(r.switching.count) + " < static " +
                    std::to_string(r.static_mode.count) + (r.static_zeno ? " (static run flagged Zeno)" : ""));
      c.require(std::abs(r.switching.min_gap - r.h) <= 1e-9,
                "h=" + num(r.h) + ": min switching gap " + num(r.switching.min_gap, 12) + " = h");
      const double dsw = std::abs(r.switching.count - paper_sw[i]) / paper_sw[i];
      const double dst = std::abs(r.static_mode.count - paper_st[i]) / paper_st[i];
      c.require(dsw <= kCountBand, "h=" + num(r.h) + ": switching count " + std::to_string(r.switching.count) +
                                       " vs printed " + num(paper_sw[i]) + " (" + num(100 * dsw, 3) + "% off)");
      c.require(dst <= kCountBand, "h=" + num(r.h) + ": static count " + std::to_string(r.static_mode.count) +
                                       " vs printed " + num(paper_st[i]) + " (" + num(100 * dst, 3) + "% off)");
    }
  } catch (const Error& e) {
    c.require(false, std::string("trigger comparison: ") + e.what());
  }
}

ControllerCertificate c6(Criterion& c, const Example& ex) {
  SynthesisOptions opt = ex.opt;
  opt.variant = PhiVariant::NoDisturbance;
  const ControllerCertificate cert = synthesize_gain(ex.params, opt);
  c.require(verify_certificate(cert, VerifyMode::NoDisturbance).pass, "disturbance-free certificate verified");
  const ClosedLoopModel model = make_closed_loop_model(ex.sys, ex.net, ex.fs_true);
  const ClosedLoopTrace tr = simulate_switching(model, cert.K, ex.trigger(cert), Disturbance(), ex.sim());
  // least squares fit of log |xi| on t >= 1
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  long n = 0;
  for (Eigen::Index i = 0; i < tr.steps(); ++i) {
    if (tr.times[i] < 1.0) continue;
    const double nrm = tr.xi.row(i).norm();
    if (!(nrm > 0.0)) continue;
    const double x = tr.times[i], y = std::log(nrm);
    sx += x, sy += y, sxx += x * x, sxy += x * y, syy += y * y;
    ++n;
  }
  const double cov = sxy - sx * sy / n, vx = sxx - sx * sx / n, vy = syy - sy * sy / n;
  const double slope = cov / vx, r2 = cov * cov / (vx * vy);
  c.require(slope < 0.0 && r2 > kR2Min, "log|xi_s| fit on t >= 1: slope " + num(slope) + ", R^2 " + num(r2));
  return cert;
}

GammaResult c7(Criterion& c, const Example& ex) {
  const GammaResult g = optimize_gamma(ex.params, ex.cfg.synthesis.omega_rho, ex.opt, ex.cfg.synthesis.gamma_iterations);
  bool mono = true;
  std::string hist;
  for (size_t i = 0; i < g.rho_history.size(); ++i) {
    if (i > 0) mono &= g.rho_history[i] <= g.rho_history[i - 1];
    hist += " " + num(g.rho_history[i], 4);
  }
  c.require(mono, "rho history non-increasing:" + hist);
  c.require(verify_certificate(g.cert, VerifyMode::Hinf).pass, "H-infinity certificate verified");
  c.require(g.gamma_opt >= kGammaLo && g.gamma_opt <= kGammaHi,
            "gamma_opt " + num(g.gamma_opt) + " in [" + num(kGammaLo) + ", " + num(kGammaHi) + "] (printed 0.5315)");
  const ClosedLoopModel model = make_closed_loop_model(ex.sys, ex.net, ex.fs_true);
  EtcSimConfig sim = ex.sim();
  sim.xi0 = Vec::Zero(ex.sys.m());
  for (DisturbanceKind k : {DisturbanceKind::Constant, DisturbanceKind::DecayingSine, DisturbanceKind::BandNoise}) {
    const Disturbance d(k, ex.cfg.simulation.disturbance.amplitude, ex.sys.n_d(), 7);
    const ClosedLoopTrace tr = simulate_switching(model, g.cert.K, ex.trigger(g.cert), d, sim);
    const double ratio = hinf_energy_ratio(tr);
    c.require(ratio <= g.gamma_opt * g.gamma_opt,
              std::string(to_string(k)) + ": energy ratio " + num(ratio) + " <= gamma^2 " + num(g.gamma_opt * g.gamma_opt));
  }
  return g;
}

void c8(Criterion& c, const Example& ex1, const ControllerCertificate& cert1) {
  const PdeSimConfig pc = ex1.pde();
  const Disturbance pd = build_disturbance(ex1.cfg, 1);
  double open_ratio = 0.0;
  try {
    const FieldTrace open = simulate(ex1.plant, nullptr, pd, pc);
    open_ratio = open.l2norms[open.steps() - 1] / open.l2norms[0];
  } catch (const DivergenceError&) {
    open_ratio = std::numeric_limits<double>::infinity();
  }
  const FullPdeResult closed = simulate_switching_full_pde(ex1.plant, *ex1.basis, cert1.K, ex1.trigger(cert1), pd, pc);
  const Vec& cn = closed.field.l2norms;
  c.require(open_ratio > 1.0, "Example 1 open loop |xi|(T)/|xi|(0) = " + num(open_ratio) + " > 1");
  c.require(cn.maxCoeff() < 10.0 * cn[0] && cn[cn.size() - 1] < cn[0],
            "Example 1 closed loop bounded: max " + num(cn.maxCoeff()) + ", |xi|(T)/|xi|(0) = " +
                num(cn[cn.size() - 1] / cn[0]));
  {
    const ClosedLoopModel model = make_closed_loop_model(ex1.sys, ex1.net, ex1.fs_true);
    EtcSimConfig paired = ex1.sim();
    paired.dt = pc.dt;
    paired.xi0 = closed.slow_projection.row(0).transpose();
    const ClosedLoopTrace red = simulate_switching(model, cert1.K, ex1.trigger(cert1), pd, paired);
    double err = 0.0, scale = 0.0;
    for (Eigen::Index i = 0; i < closed.slow_projection.rows(); ++i) {
      const Eigen::Index n = std::lround(closed.field.times[i] / pc.dt);
      if (n >= red.steps()) break;
      err = std::max(err, (closed.slow_projection.row(i) - red.xi.row(n)).norm());
      scale = std::max(scale, red.xi.row(n).norm());
    }
    c.require(err <= kTrackTol * scale, "slow projection vs reduced simulation: max deviation " + num(err) + " = " +
                                            num(100.0 * err / scale, 3) + "% of sup |xi_s|");
  }

  const Example ex2("example2.json");
  const ControllerCertificate cert2 = synthesize_gain(ex2.params, ex2.opt);
  const PdeSimConfig pc2 = ex2.pde();
  const Disturbance pd2 = ex2.plant.b1.empty() ? Disturbance() : build_disturbance(ex2.cfg, 1);
  const FullPdeResult c2 = simulate_switching_full_pde(ex2.plant, *ex2.basis, cert2.K, ex2.trigger(cert2), pd2, pc2);
  const Vec& n2 = c2.field.l2norms;
  c.require(n2[n2.size() - 1] < 0.5 * n2[0], "Example 2 closed-loop density decays: |xi|(0) = " + num(n2[0]) +
                                                 ", |xi|(T) = " + num(n2[n2.size() - 1]));
}

void c9(Criterion& c, const Example& ex, const std::vector<std::pair<const ControllerCertificate*, PhiVariant>>& certs) {
  // orthonormality
  double ortho = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      ortho = std::max(ortho, std::abs(gk([&](double p) { return ex.basis->phi(i, p) * ex.basis->phi(j, p); }, 0, pi) -
                                       (i == j ? 1.0 : 0.0)));
  c.require(ortho < 1e-10, "orthonormality: max |<phi_i, phi_j> - delta_ij| = " + num(ortho));

  // sector bounds on a dense sweep
  const SectorBounds sb = sector_bounds(ex.net);
  bool sector = true;
  for (int j = 0; j < ex.net.hidden(); ++j)
    for (int k = -400; k <= 400; ++k) {
      const double s = 0.05 * k;
      if (s == 0.0) continue;
      const double slope = activation(s, ex.net.q[j], ex.net.r[j]) / s;
      sector &= slope >= sb.g_min[j] - 1e-12 && slope <= sb.g_max[j] + 1e-12;
    }
  c.require(sector, "activation slopes inside [g_min, g_max] on s in [-20, 20]");

  // branch identity
  std::srand(5);
  double branch = 0.0;
  for (int t = 0; t < 200; ++t) {
    SwitchingController ctrl;
    ctrl.K = Mat::Random(2, 1);
    ctrl.C = ex.sys.C;
    const Vec a = Vec::Random(2), b = Vec::Random(2);
    ctrl.y_held = ctrl.C * b;
    const ControlBranches br = control_law_branches(ctrl, a, b);
    const Vec u = control_law(ctrl);
    branch = std::max({branch, (br.waiting - u).norm(), (br.event - u).norm()});
  }
  c.require(branch <= 1e-12, "control-law branches agree: max diff " + num(branch));

  // Schur consistency and independent re-verification of every certificate
  for (const auto& [cert, variant] : certs) {
    std::string d;
    const bool ok = schur_consistent(*cert, variant, d);
    const char* label = variant == PhiVariant::NoDisturbance ? "disturbance-free" : "stability";
    c.require(ok, std::string("relaxed => exact on the ") + label + " certificate: " + d);
  }
  {
    VariableSet vs;
    const AffineMat X = vs.symmetric("X", 2);
    Mat A(2, 2);
    A << -1.0, 2.0, 0.0, -3.0;
    const std::vector<LmiConstraint> lc{{"lyap", A.transpose() * X + X * A, Sense::NegativeDefinite},
                                        {"pos", X - AffineMat::identity(2), Sense::PositiveDefinite}};
    const SdpResult r = sdp_solve(vs.size(), lc);
    const Mat Xv = vs.value("X", r.x);
    const bool ok = r.ok() && max_eig(A.transpose() * Xv + Xv * A) < 0.0 && -max_eig(-Xv) > 1.0;
    c.require(ok, "solver verdict re-verified by direct eigenvalues");
  }

  // Lyapunov non-increase on a disturbance-free run of the first certificate
  {
    const ControllerCertificate& cert = *certs.front().first;
    const ClosedLoopModel model = make_closed_loop_model(ex.sys, ex.net);
    const ClosedLoopTrace tr = simulate_switching(model, cert.K, ex.trigger(cert), Disturbance(), ex.sim());
    const LyapunovReport ly = lyapunov_evaluate(tr, cert);
    c.require(ly.non_increasing, "Lyapunov non-increase with d = 0: " + std::to_string(ly.increases) +
                                     " increasing steps, V(0) = " + num(ly.V[0]));
  }

  // byte-identical reruns
  {
    const fs::path a = fs::temp_directory_path() / "pdeetc_acc_a", b = fs::temp_directory_path() / "pdeetc_acc_b";
    for (const auto& dir : {a, b}) {
      fs::remove_all(dir);
      fs::create_directories(dir);
      ExperimentConfig cfg = ex.cfg;
      cfg.identification.spacing = 0.25;
      cfg.identification.lm.k_max = 40;
      const IdentificationResult r = identify(cfg, ex.plant, ex.basis, ex.sys);
      write_weights_csv(r.net, (dir / "weights.csv").string());
      const ClosedLoopModel model = make_closed_loop_model(ex.sys, ex.net, ex.fs_true);
      (void)compare_triggers(model, certs.front().first->K, ex.cfg.synthesis.epsilon, certs.front().first->params.Lambda,
                             ex.dist, ex.sim(), {0.11}, dir.string());
    }
    bool same = true;
    int files = 0;
    for (const auto& e : fs::directory_iterator(a)) {
      ++files;
      same &= slurp(e.path()) == slurp(b / e.path().filename());
    }
    c.require(same && files >= 3, "byte-identical reruns (" + std::to_string(files) + " artifacts)");
    fs::remove_all(a);
    fs::remove_all(b);
  }
}

}  // namespace

int main() {
  std::vector<Criterion> cs{{1, "spectral correctness"},   {2, "projection oracle"},      {3, "identification"},
                            {4, "synthesis soundness"},    {5, "trigger economy"},        {6, "disturbance-free decay"},
                            {7, "H-infinity attenuation"}, {8, "full-PDE validation"},    {9, "property suites"}};
  auto guarded = [](Criterion& c, const std::function<void()>& f) {
    try {
      f();
    } catch (const std::exception& e) {
      c.require(false, std::string("exception: ") + e.what());
    }
  };
  const auto t0 = std::chrono::steady_clock::now();

  std::unique_ptr<Example> ex;
  guarded(cs[0], [&] { c1(cs[0]); });
  try {
    ex = std::make_unique<Example>("example1.json");
  } catch (const std::exception& e) {
    for (size_t i = 1; i < cs.size(); ++i) cs[i].require(false, std::string("setup: ") + e.what());
  }
  std::optional<ControllerCertificate> cert, cert_nd;
  std::optional<GammaResult> gamma;
  if (ex) {
    guarded(cs[1], [&] { c2(cs[1], *ex); });
    guarded(cs[2], [&] { (void)c3(cs[2], *ex); });
    guarded(cs[3], [&] { cert = c4(cs[3], *ex); });
    if (cert) {
      guarded(cs[4], [&] { c5(cs[4], *ex, *cert); });
      guarded(cs[7], [&] { c8(cs[7], *ex, *cert); });
    } else {
      cs[4].require(false, "no certificate from criterion 4");
      cs[7].require(false, "no certificate from criterion 4");
    }
    guarded(cs[5], [&] { cert_nd = c6(cs[5], *ex); });
    guarded(cs[6], [&] { gamma = c7(cs[6], *ex); });
    std::vector<std::pair<const ControllerCertificate*, PhiVariant>> certs;
    if (cert) certs.emplace_back(&*cert, PhiVariant::Stability);
    if (cert_nd) certs.emplace_back(&*cert_nd, PhiVariant::NoDisturbance);
    if (certs.empty())
      cs[8].require(false, "no certificate available");
    else
      guarded(cs[8], [&] { c9(cs[8], *ex, certs); });
  }

  int failed = 0;
  for (const auto& c : cs) {
    std::printf("criterion %d [%s] %s\n", c.id, c.pass ? "PASS" : "FAIL", c.title.c_str());
    for (const auto& l : c.lines) std::printf("    %s\n", l.c_str());
    failed += !c.pass;
  }
  std::printf("%d/%zu criteria passed (%.1f s)\n", static_cast<int>(cs.size()) - failed, cs.size(),
              seconds_since(t0));
  return failed == 0 ? 0 : 1;
}
