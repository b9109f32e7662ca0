#include "pdeetc/pipeline.hpp"

#include "pdeetc/error.hpp"
#include "pdeetc/examples.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <optional>
#include <sstream>

namespace pdeetc {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

std::string fmt(double v, int prec = 6) {
  std::ostringstream os;
  os << std::setprecision(prec) << v;
  return os.str();
}

Vec to_vec(const std::vector<double>& v) { return Eigen::Map<const Vec>(v.data(), static_cast<Eigen::Index>(v.size())); }

std::string join(const fs::path& dir, const std::string& name) { return (dir / name).string(); }

}  // namespace

IdentificationResult identify(const ExperimentConfig& cfg, const PlantModel& plant, BasisPtr basis,
                              const SlowSystem& sys) {
  const auto& c = cfg.identification;
  const Vec lo = to_vec(c.region_lo), hi = to_vec(c.region_hi);
  const SlowMap fs_true = galerkin_nonlinearity(plant.f, basis);
  TrainingSet data;
  if (c.sampler == "pde") {
    PdeSampler s(plant, basis);
    data = generate_targets(s, lo, hi, c.spacing, c.dTs, sys.A);
  } else {
    SlowModelSampler s(sys.A, fs_true);
    data = generate_targets(s, lo, hi, c.spacing, c.dTs, sys.A);
  }
  const Mnn init = init_mnn(sys.m(), c.n_h, c.q, c.r, c.seed);
  IdentificationResult r;
  r.lm = train_lm(init, data, c.lm);
  r.net = r.lm.net;
  r.samples = static_cast<long>(data.size());
  r.mse = training_mse(r.net, data);
  r.lm_loss = training_loss(r.net, data);
  const TrainResult bp = train_bp_baseline(init, data, c.bp_rate, std::max(r.lm.iterations, 1));
  r.bp_loss = training_loss(bp.net, data);
  r.delta = estimate_delta(r.net, fs_true, lo, hi, c.spacing);
  return r;
}

void write_identification_json(const IdentificationResult& r, const std::string& path) {
  json j;
  j["samples"] = r.samples;
  j["iterations"] = r.lm.iterations;
  j["converged"] = r.lm.converged;
  j["stalled"] = r.lm.stalled;
  j["mse"] = r.mse;
  j["loss"] = r.lm_loss;
  j["bp_loss_equal_iterations"] = r.bp_loss;
  j["delta"] = r.delta;
  j["loss_history"] = r.lm.loss_history;
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path);
  out << std::setprecision(17) << j.dump(2) << "\n";
}

Mnn synthesis_network(const ExperimentConfig& cfg, const Mnn* trained) {
  const std::string& n = cfg.synthesis.network;
  if (n == "trained") {
    if (!trained) throw Error(ErrorKind::Config, "synthesis.network = trained needs an identified network");
    return *trained;
  }
  if (n == "table1") return table1_network();
  if (n == "table4") return table4_network();
  return read_weights_csv(n);
}

SynthesisParams synthesis_params(const ExperimentConfig& cfg, const SlowSystem& sys, const Mnn& net, double delta) {
  const auto& s = cfg.synthesis;
  SynthesisParams p;
  p.A = sys.A;
  p.B2 = sys.B2;
  p.B1 = sys.B1;
  p.C = sys.C;
  p.W = net.W;
  p.V = net.V;
  p.q = net.q;
  p.r = net.r;
  p.sector = sector_bounds(net);
  p.delta = delta;
  p.h = s.h;
  p.epsilon = s.epsilon;
  p.Lambda = s.Lambda * Mat::Identity(sys.n_y(), sys.n_y());
  p.alpha = s.alpha;
  p.beta1 = s.beta1;
  p.beta2 = s.beta2;
  p.D1 = cfg.simulation.D1;
  p.margin = s.margin;
  return p;
}

SynthesisOptions synthesis_options(const ExperimentConfig& cfg) {
  SynthesisOptions o;
  o.grid_search = cfg.synthesis.grid_search;
  o.variant = parse_variant(cfg.synthesis.variant);
  o.sdp.margin = cfg.synthesis.margin;
  return o;
}

Vec slow_initial_state(const ExperimentConfig& cfg, const PlantModel& plant, const ModalBasis& basis) {
  if (!cfg.simulation.xi0_slow.empty()) return to_vec(cfg.simulation.xi0_slow);
  return project_slow(plant.xi0, basis);
}

std::vector<TriggerComparison> compare_triggers(const ClosedLoopModel& model, const Mat& K, double epsilon,
                                                const Mat& Lambda, const Disturbance& d, const EtcSimConfig& sim,
                                                const std::vector<double>& h_values, const std::string& csv_dir) {
  std::vector<TriggerComparison> rows;
  for (double h : h_values) {
    TriggerComparison row;
    row.h = h;
    EtcSimConfig s = sim;
    s.dt = h / 100.0;
    const ClosedLoopTrace sw = simulate_switching(model, K, TriggerConfig{h, epsilon, Lambda}, d, s);
    const ClosedLoopTrace st = simulate_static(model, K, epsilon, Lambda, d, s);
    row.switching = count_triggers(sw);
    row.static_mode = count_triggers(st);
    row.static_zeno = st.zeno;
    if (!csv_dir.empty()) {
      write_closed_loop_csv(sw, join(csv_dir, "switching_h" + fmt(h) + ".csv"));
      write_closed_loop_csv(st, join(csv_dir, "static_h" + fmt(h) + ".csv"));
    }
    rows.push_back(row);
  }
  return rows;
}

std::string trigger_table(const std::vector<TriggerComparison>& rows) {
  std::ostringstream os;
  os << std::left << std::setw(22) << "Triggered times";
  for (const auto& r : rows) os << std::setw(12) << ("h=" + fmt(r.h));
  os << "\n" << std::setw(22) << "Switching ETC";
  for (const auto& r : rows) os << std::setw(12) << r.switching.count;
  os << "\n" << std::setw(22) << "Static ETC";
  for (const auto& r : rows) os << std::setw(12) << (std::to_string(r.static_mode.count) + (r.static_zeno ? "*" : ""));
  os << "\n";
  for (const auto& r : rows)
    os << "h=" << fmt(r.h) << ": switching min/mean gap " << fmt(r.switching.min_gap) << "/" << fmt(r.switching.mean_gap)
       << ", static min/mean gap " << fmt(r.static_mode.min_gap) << "/" << fmt(r.static_mode.mean_gap)
       << (r.static_zeno ? " (static run stopped by the Zeno guard)" : "") << "\n";
  return os.str();
}

bool PipelineReport::hard_failure() const {
  for (const auto& c : checks)
    if (c.hard && !c.pass) return true;
  return false;
}

std::string PipelineReport::table() const {
  std::ostringstream os;
  for (const auto& c : checks)
    os << (c.pass ? "PASS" : "FAIL") << (c.hard ? " [hard] " : "        ") << std::left << std::setw(34) << c.name
       << " " << c.detail << "\n";
  return os.str();
}

PipelineReport run_pipeline(const ExperimentConfig& cfg, const std::string& out_dir) {
  PipelineReport rep;
  const fs::path dir(out_dir);
  fs::create_directories(dir);
  auto artifact = [&](const std::string& name) {
    rep.artifacts.push_back(name);
    return join(dir, name);
  };
  auto check = [&](const std::string& name, bool pass, bool hard, const std::string& detail) {
    rep.checks.push_back({name, pass, hard, detail});
  };
  auto stage = [](const char* name, auto&& fn) {
    try {
      return fn();
    } catch (const Error& e) {
      throw Error(e.kind(), std::string("stage ") + name + ": " + e.what());
    }
  };

  const PlantModel plant = stage("basis", [&] { return build_plant(cfg); });
  const BasisPtr basis = stage("basis", [&] { return build_basis(cfg); });
  write_basis_csv(*basis, artifact("basis.csv"));
  const SpectralGap gap = spectral_gap(*basis, cfg.reduction.m);
  {
    std::ostringstream os;
    os << "lambda = " << basis->eigenvalues.head(cfg.reduction.m).transpose() << ", gap eps = " << fmt(gap.epsilon);
    check("basis separable", gap.separable, false, os.str());
  }
  const SlowSystem sys = stage("slow-system", [&] { return assemble_slow_system(basis, plant.b2, plant.b1, plant.cbar); });
  const SlowMap fs_true = galerkin_nonlinearity(plant.f, basis);

  const IdentificationResult id = stage("identify", [&] { return identify(cfg, plant, basis, sys); });
  write_weights_csv(id.net, artifact("weights.csv"));
  write_identification_json(id, artifact("identification.json"));
  check("identification fit", id.mse < 1e-4 && id.delta < 0.2, false,
        "mse " + fmt(id.mse) + ", delta " + fmt(id.delta) + ", LM loss " + fmt(id.lm_loss) + " vs BP " + fmt(id.bp_loss));

  const Mnn net = stage("synthesize", [&] { return synthesis_network(cfg, &id.net); });
  double delta = cfg.synthesis.delta;
  if (delta < 0.0) {
    const auto& c = cfg.identification;
    delta = estimate_delta(net, fs_true, to_vec(c.region_lo), to_vec(c.region_hi), c.spacing);
  }
  const SynthesisParams params = synthesis_params(cfg, sys, net, delta);
  const SynthesisOptions opt = synthesis_options(cfg);
  const ControllerCertificate cert = stage("synthesize", [&] { return synthesize_gain(params, opt); });
  write_certificate(cert, artifact("certificate.json"));
  const VerifyMode vmode = opt.variant == PhiVariant::NoDisturbance ? VerifyMode::NoDisturbance : VerifyMode::Stability;
  const VerifyReport vr = verify_certificate(cert, vmode);
  {
    std::ostringstream os;
    os << "K = " << cert.K.transpose() << " (beta1 " << cert.params.beta1 << ", Lambda " << cert.params.Lambda(0, 0)
       << ", delta " << fmt(delta) << ")";
    check("certificate verified", vr.pass, true, os.str());
  }
  const double bound = ultimate_bound(cert, cfg.simulation.D1);

  std::optional<GammaResult> gamma;
  if (cfg.synthesis.optimize_gamma) {
    gamma = stage("hinf-optimize",
                  [&] { return optimize_gamma(params, cfg.synthesis.omega_rho, opt, cfg.synthesis.gamma_iterations); });
    write_certificate(gamma->cert, artifact("certificate_hinf.json"));
    bool monotone = true;
    for (size_t i = 1; i < gamma->rho_history.size(); ++i) monotone &= gamma->rho_history[i] <= gamma->rho_history[i - 1];
    check("gamma optimisation", monotone && verify_certificate(gamma->cert, VerifyMode::Hinf).pass, true,
          "gamma_opt " + fmt(gamma->gamma_opt) + " after " + std::to_string(gamma->rho_history.size()) + " accepted iterates");
  }

  // slow closed loop: true projected nonlinearity, configured disturbance
  const Disturbance dist = build_disturbance(cfg, sys.n_d());
  const ClosedLoopModel true_model = make_closed_loop_model(sys, net, fs_true);
  const ClosedLoopModel net_model = make_closed_loop_model(sys, net);
  EtcSimConfig sim;
  sim.T = cfg.simulation.T;
  sim.dt = cfg.simulation.dt;
  sim.xi0 = slow_initial_state(cfg, plant, *basis);
  const TriggerConfig tcfg{cfg.synthesis.h, cfg.synthesis.epsilon, params.Lambda};
  const ClosedLoopTrace main = stage("simulate", [&] { return simulate_switching(true_model, cert.K, tcfg, dist, sim); });
  write_closed_loop_csv(main, artifact("closed_loop.csv"));
  {
    double sup = 0.0;
    for (Eigen::Index i = 0; i < main.steps(); ++i)
      if (main.times[i] >= 0.5 * sim.T) sup = std::max(sup, main.xi.row(i).norm());
    check("closed loop inside ultimate bound", sup < bound, false,
          "sup |xi| on [T/2, T] = " + fmt(sup) + ", bound " + fmt(bound));
  }

  std::vector<double> hs = cfg.simulation.h_values;
  if (hs.empty()) hs.push_back(cfg.synthesis.h);
  try {
    const auto rows = compare_triggers(true_model, cert.K, cfg.synthesis.epsilon, params.Lambda, dist, sim, hs,
                                       out_dir);
    for (double h : hs) {
      rep.artifacts.push_back("switching_h" + fmt(h) + ".csv");
      rep.artifacts.push_back("static_h" + fmt(h) + ".csv");
    }
    const std::string table = trigger_table(rows);
    std::ofstream(artifact("trigger_summary.txt")) << table;
    bool fewer = true;
    std::string detail;
    for (const auto& r : rows) {
      fewer &= r.switching.count < r.static_mode.count;
      detail += "h=" + fmt(r.h) + ": " + std::to_string(r.switching.count) + " vs " +
                std::to_string(r.static_mode.count) + "; ";
    }
    check("switching fires less than static", fewer, false, detail);
    check("min inter-event time >= h", true, true, "asserted on every switching run");
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::Assertion) throw;
    check("min inter-event time >= h", false, true, e.what());
  }

  {
    EtcSimConfig quiet = sim;
    const ClosedLoopTrace tr = simulate_switching(net_model, cert.K, tcfg, Disturbance(), quiet);
    const LyapunovReport ly = lyapunov_evaluate(tr, cert);
    check("Lyapunov non-increase (d = 0)", ly.non_increasing, false,
          std::to_string(ly.increases) + " increasing steps, V(0) = " + fmt(ly.V[0]));
  }

  if (gamma) {
    const ClosedLoopModel m = make_closed_loop_model(sys, net);
    EtcSimConfig zero = sim;
    zero.xi0 = Vec::Zero(sys.m());
    const ClosedLoopTrace tr =
        simulate_switching(m, gamma->cert.K, TriggerConfig{cfg.synthesis.h, cfg.synthesis.epsilon, params.Lambda},
                           dist, zero);
    const double ratio = hinf_energy_ratio(tr);
    check("energy ratio <= gamma^2", ratio <= gamma->gamma_opt * gamma->gamma_opt, false,
          "ratio " + fmt(ratio) + ", gamma^2 " + fmt(gamma->gamma_opt * gamma->gamma_opt));
  }

  // full PDE
  PdeSimConfig pc;
  pc.grid_n = cfg.simulation.pde_grid_n;
  pc.dt = cfg.simulation.pde_dt;
  pc.T = cfg.simulation.T;
  pc.stride = cfg.simulation.pde_stride;
  const Disturbance pde_dist = plant.b1.empty() ? Disturbance() : build_disturbance(cfg, static_cast<int>(plant.b1.size()));
  double open_growth = 0.0;
  try {
    const FieldTrace open = simulate(plant, nullptr, pde_dist, pc);
    write_norm_csv(open.times, open.l2norms, artifact("pde_open_norm.csv"));
    open_growth = open.l2norms[open.steps() - 1] / open.l2norms[0];
  } catch (const DivergenceError& e) {
    write_norm_csv(e.partial().times, e.partial().l2norms, artifact("pde_open_norm.csv"));
    open_growth = std::numeric_limits<double>::infinity();
  }
  const FullPdeResult closed =
      stage("simulate", [&] { return simulate_switching_full_pde(plant, *basis, cert.K, tcfg, pde_dist, pc); });
  write_norm_csv(closed.field.times, closed.field.l2norms, artifact("pde_closed_norm.csv"));
  write_field_heatmap_csv(closed.field, artifact("pde_closed_field.csv"));
  write_closed_loop_csv(closed.loop, artifact("pde_closed_loop.csv"));
  const Vec& cn = closed.field.l2norms;
  check("open vs closed PDE", cn[cn.size() - 1] < cn[0], false,
        "open |xi|(T)/|xi|(0) = " + fmt(open_growth) + ", closed = " + fmt(cn[cn.size() - 1] / cn[0]));
  {
    EtcSimConfig paired = sim;
    paired.dt = pc.dt;
    paired.xi0 = closed.slow_projection.row(0).transpose();
    const ClosedLoopTrace red = simulate_switching(true_model, cert.K, tcfg, pde_dist, paired);
    double err = 0.0, scale = 0.0;
    for (Eigen::Index i = 0; i < closed.slow_projection.rows(); ++i) {
      const Eigen::Index n = std::lround(closed.field.times[i] / pc.dt);
      if (n >= red.steps()) break;
      err = std::max(err, (closed.slow_projection.row(i) - red.xi.row(n)).norm());
      scale = std::max(scale, red.xi.row(n).norm());
    }
    check("slow projection tracks reduced model", err <= 0.1 * scale, false,
          "max deviation " + fmt(err) + " (" + fmt(100.0 * err / std::max(scale, 1e-300), 3) + "% of sup)");
  }

  json j;
  j["name"] = cfg.name;
  j["eigenvalues"] = std::vector<double>(basis->eigenvalues.data(), basis->eigenvalues.data() + basis->eigenvalues.size());
  j["delta"] = delta;
  j["K"] = std::vector<double>(cert.K.data(), cert.K.data() + cert.K.size());
  j["ultimate_bound"] = bound;
  if (gamma) j["gamma_opt"] = gamma->gamma_opt;
  j["disturbance"] = dist.describe();
  json jc = json::array();
  for (const auto& c : rep.checks) jc.push_back({{"name", c.name}, {"pass", c.pass}, {"hard", c.hard}, {"detail", c.detail}});
  j["checks"] = jc;
  j["artifacts"] = rep.artifacts;
  std::ofstream(join(dir, "report.json")) << std::setprecision(17) << j.dump(2) << "\n";
  std::ofstream(join(dir, "checks.txt")) << rep.table();
  return rep;
}

void write_norm_csv(const Vec& times, const Vec& norms, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path);
  out << std::setprecision(10) << "t,norm\n";
  for (Eigen::Index i = 0; i < times.size(); ++i) out << times[i] << "," << norms[i] << "\n";
}

void write_field_heatmap_csv(const FieldTrace& trace, const std::string& path, int every) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path);
  out << std::setprecision(8) << "t,p,value\n";
  for (Eigen::Index r = 0; r < trace.fields.rows(); ++r)
    for (Eigen::Index c = 0; c < trace.fields.cols(); c += std::max(every, 1))
      out << trace.times[r] << "," << trace.grid[c] << "," << trace.fields(r, c) << "\n";
}

namespace {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  std::vector<int> columns(const std::string& prefix) const {
    std::vector<int> out;
    for (size_t i = 0; i < header.size(); ++i)
      if (header[i].rfind(prefix, 0) == 0) out.push_back(static_cast<int>(i));
    return out;
  }
  int column(const std::string& name) const {
    for (size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return static_cast<int>(i);
    return -1;
  }
};

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot read trace " + path);
  CsvTable t;
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorKind::Io, "empty trace file " + path);
  std::stringstream hs(line);
  for (std::string cell; std::getline(hs, cell, ',');) t.header.push_back(cell);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ls(line);
    for (std::string cell; std::getline(ls, cell, ',');) row.push_back(std::stod(cell));
    if (row.size() != t.header.size()) throw Error(ErrorKind::Io, "ragged row in " + path);
    t.rows.push_back(std::move(row));
  }
  return t;
}

void write_columns(const CsvTable& t, const std::vector<int>& cols, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path);
  out << std::setprecision(10) << "t";
  for (int c : cols) out << "," << t.header[c];
  out << "\n";
  for (const auto& r : t.rows) {
    out << r[0];
    for (int c : cols) out << "," << r[c];
    out << "\n";
  }
}

}  // namespace

std::vector<std::string> export_plots_data(const std::vector<std::string>& trace_files, const std::string& out_dir) {
  fs::create_directories(out_dir);
  std::vector<std::string> written;
  for (const auto& file : trace_files) {
    const CsvTable t = read_csv(file);
    if (t.header.empty() || t.header[0] != "t") throw Error(ErrorKind::Io, file + " is not a closed-loop trace");
    const std::string stem = fs::path(file).stem().string();
    auto out = [&](const std::string& suffix) {
      written.push_back(join(out_dir, stem + suffix));
      return written.back();
    };
    {
      const auto xi = t.columns("xi_");
      std::ofstream o(out("_norm.csv"));
      o << std::setprecision(10) << "t,norm\n";
      for (const auto& r : t.rows) {
        double s = 0.0;
        for (int c : xi) s += r[c] * r[c];
        o << r[0] << "," << std::sqrt(s) << "\n";
      }
    }
    {
      const int fired = t.column("fired");
      std::ofstream o(out("_triggers.csv"));
      o << std::setprecision(10) << "event,t\n";
      long k = 0;
      if (fired >= 0)
        for (const auto& r : t.rows)
          if (r[fired] != 0.0) o << k++ << "," << r[0] << "\n";
    }
    write_columns(t, t.columns("u_"), out("_u.csv"));
    write_columns(t, t.columns("e_"), out("_e.csv"));
    write_columns(t, t.columns("y_"), out("_y.csv"));
  }
  return written;
}

}  // namespace pdeetc
