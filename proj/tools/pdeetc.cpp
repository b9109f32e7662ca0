// Command-line runner: one subcommand per pipeline stage plus `run`.
#include "pdeetc/config.hpp"
#include "pdeetc/error.hpp"
#include "pdeetc/pipeline.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>

using namespace pdeetc;
namespace fs = std::filesystem;

namespace {

constexpr int kInfeasible = 2;
constexpr int kNumerical = 3;
constexpr int kAssertion = 4;

int exit_code(ErrorKind k) {
  switch (k) {
    case ErrorKind::Infeasible: return kInfeasible;
    case ErrorKind::NumericalFailure:
    case ErrorKind::Solver:
    case ErrorKind::Divergence:
    case ErrorKind::TrainingStalled: return kNumerical;
    case ErrorKind::Assertion:
    case ErrorKind::CertificateRejected: return kAssertion;
    default: return 1;
  }
}

struct Common {
  std::string config;
  std::string out_dir = "out";
  long long seed = -1;
  double margin = -1.0;
};

ExperimentConfig load(const Common& c) {
  if (c.config.empty()) throw Error(ErrorKind::Config, "--config is required");
  ExperimentConfig cfg = load_config(c.config);
  if (c.seed >= 0) cfg.identification.seed = static_cast<std::uint64_t>(c.seed);
  if (c.margin > 0.0) cfg.synthesis.margin = c.margin;
  return cfg;
}

std::string out_path(const Common& c, const std::string& name) {
  fs::create_directories(c.out_dir);
  return (fs::path(c.out_dir) / name).string();
}

void require_file(const std::string& path, const char* what) {
  if (path.empty() || !fs::exists(path))
    throw Error(ErrorKind::Io, std::string("missing ") + what + " file '" + path + "'");
}

struct Setup {
  ExperimentConfig cfg;
  PlantModel plant;
  BasisPtr basis;
  SlowSystem sys;
};

Setup setup(const Common& c) {
  Setup s;
  s.cfg = load(c);
  s.plant = build_plant(s.cfg);
  s.basis = build_basis(s.cfg);
  s.sys = assemble_slow_system(s.basis, s.plant.b2, s.plant.b1, s.plant.cbar);
  return s;
}

// Network for synthesis; "trained" reads <out-dir>/weights.csv written by `identify`.
Mnn network_for(const Setup& s, const Common& c, const std::string& weights) {
  if (!weights.empty()) {
    require_file(weights, "weights");
    return read_weights_csv(weights);
  }
  if (s.cfg.synthesis.network == "trained") {
    const std::string w = out_path(c, "weights.csv");
    require_file(w, "weights (run `identify` first)");
    return read_weights_csv(w);
  }
  return synthesis_network(s.cfg, nullptr);
}

double delta_for(const Setup& s, const Mnn& net) {
  if (s.cfg.synthesis.delta >= 0.0) return s.cfg.synthesis.delta;
  const auto& id = s.cfg.identification;
  const Vec lo = Eigen::Map<const Vec>(id.region_lo.data(), static_cast<Eigen::Index>(id.region_lo.size()));
  const Vec hi = Eigen::Map<const Vec>(id.region_hi.data(), static_cast<Eigen::Index>(id.region_hi.size()));
  return estimate_delta(net, galerkin_nonlinearity(s.plant.f, s.basis), lo, hi, id.spacing);
}

void add_common(CLI::App* app, Common& c, bool needs_config = true) {
  auto* opt = app->add_option("--config", c.config, "experiment JSON");
  if (needs_config) opt->required();
  app->add_option("--out-dir", c.out_dir, "artifact directory");
  app->add_option("--seed", c.seed, "identification seed override");
  app->add_option("--margin", c.margin, "strictness margin override");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Switching event-triggered control of semilinear parabolic PDEs"};
  app.require_subcommand(1);
  Common c;
  std::string certificate, weights, mode = "stability";
  std::vector<std::string> traces;

  auto* basis = app.add_subcommand("basis", "eigenpairs of the spatial operator");
  add_common(basis, c);
  auto* identify_cmd = app.add_subcommand("identify", "train the slow-nonlinearity network");
  add_common(identify_cmd, c);
  auto* synth = app.add_subcommand("synthesize", "solve the LMIs for a switching gain");
  add_common(synth, c);
  synth->add_option("--weights", weights, "network weights CSV (overrides synthesis.network)");
  auto* simulate_cmd = app.add_subcommand("simulate", "closed-loop slow and full-PDE simulation");
  add_common(simulate_cmd, c);
  simulate_cmd->add_option("--certificate", certificate, "certificate JSON")->required();
  auto* compare = app.add_subcommand("compare-triggers", "switching vs static trigger counts");
  add_common(compare, c);
  compare->add_option("--certificate", certificate, "certificate JSON")->required();
  auto* hinf = app.add_subcommand("hinf-optimize", "minimise the attenuation level");
  add_common(hinf, c);
  hinf->add_option("--weights", weights, "network weights CSV (overrides synthesis.network)");
  auto* verify = app.add_subcommand("verify", "eigenvalue check of a certificate");
  add_common(verify, c, false);
  verify->add_option("--certificate", certificate, "certificate JSON")->required();
  verify->add_option("--mode", mode, "stability | hinf | no-disturbance");
  auto* run = app.add_subcommand("run", "full pipeline");
  add_common(run, c);
  auto* exporter = app.add_subcommand("export-plots", "plot-ready CSVs from closed-loop traces");
  add_common(exporter, c, false);
  exporter->add_option("traces", traces, "closed-loop trace CSVs")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*basis) {
      const Setup s = setup(c);
      write_basis_csv(*s.basis, out_path(c, "basis.csv"));
      const SpectralGap gap = spectral_gap(*s.basis, s.cfg.reduction.m);
      std::cout << "lambda = " << s.basis->eigenvalues.transpose() << "\n"
                << "slow modes m = " << s.cfg.reduction.m << ", gap epsilon = " << gap.epsilon
                << (gap.separable ? " (separable)" : " (not separable)") << "\n"
                << "A_s =\n" << s.sys.A << "\nB2_s =\n" << s.sys.B2 << "\nB1_s =\n" << s.sys.B1 << "\nC_s =\n"
                << s.sys.C << "\n";
    } else if (*identify_cmd) {
      const Setup s = setup(c);
      const IdentificationResult r = identify(s.cfg, s.plant, s.basis, s.sys);
      write_weights_csv(r.net, out_path(c, "weights.csv"));
      write_identification_json(r, out_path(c, "identification.json"));
      std::cout << "samples " << r.samples << ", LM iterations " << r.lm.iterations << ", mse " << r.mse
                << ", delta " << r.delta << ", LM loss " << r.lm_loss << " vs BP " << r.bp_loss << "\n";
      if (r.lm.stalled) std::cerr << "warning: LM stalled (damping limit reached)\n";
    } else if (*synth || *hinf) {
      const Setup s = setup(c);
      const Mnn net = network_for(s, c, weights);
      const SynthesisParams p = synthesis_params(s.cfg, s.sys, net, delta_for(s, net));
      const SynthesisOptions o = synthesis_options(s.cfg);
      if (*synth) {
        const ControllerCertificate cert = synthesize_gain(p, o);
        write_certificate(cert, out_path(c, "certificate.json"));
        for (const auto& line : cert.log) std::cout << "  " << line << "\n";
        std::cout << "K = " << cert.K.transpose() << "\nultimate bound " << ultimate_bound(cert, s.cfg.simulation.D1)
                  << "\n";
      } else {
        const GammaResult g = optimize_gamma(p, s.cfg.synthesis.omega_rho, o, s.cfg.synthesis.gamma_iterations);
        write_certificate(g.cert, out_path(c, "certificate_hinf.json"));
        std::cout << "rho history:";
        for (double r : g.rho_history) std::cout << " " << r;
        std::cout << "\ngamma_opt = " << g.gamma_opt << (g.stalled ? " (iteration limit reached)" : "")
                  << "\nK = " << g.cert.K.transpose() << "\n";
      }
    } else if (*simulate_cmd || *compare) {
      require_file(certificate, "certificate");
      const Setup s = setup(c);
      const ControllerCertificate cert = read_certificate(certificate);
      const Mnn net = network_for(s, c, "");
      const ClosedLoopModel model =
          make_closed_loop_model(s.sys, net, galerkin_nonlinearity(s.plant.f, s.basis));
      const Disturbance d = build_disturbance(s.cfg, s.sys.n_d());
      EtcSimConfig sim;
      sim.T = s.cfg.simulation.T;
      sim.dt = s.cfg.simulation.dt;
      sim.xi0 = slow_initial_state(s.cfg, s.plant, *s.basis);
      if (*compare) {
        std::vector<double> hs = s.cfg.simulation.h_values;
        if (hs.empty()) hs.push_back(s.cfg.synthesis.h);
        fs::create_directories(c.out_dir);
        const auto rows =
            compare_triggers(model, cert.K, s.cfg.synthesis.epsilon, cert.params.Lambda, d, sim, hs, c.out_dir);
        const std::string table = trigger_table(rows);
        std::ofstream(out_path(c, "trigger_summary.txt")) << table;
        std::cout << table;
      } else {
        const TriggerConfig tc{s.cfg.synthesis.h, s.cfg.synthesis.epsilon, cert.params.Lambda};
        const ClosedLoopTrace tr = simulate_switching(model, cert.K, tc, d, sim);
        write_closed_loop_csv(tr, out_path(c, "closed_loop.csv"));
        std::cout << trigger_summary(tr) << "\n";
        PdeSimConfig pc;
        pc.grid_n = s.cfg.simulation.pde_grid_n;
        pc.dt = s.cfg.simulation.pde_dt;
        pc.T = s.cfg.simulation.T;
        pc.stride = s.cfg.simulation.pde_stride;
        const Disturbance pd = s.plant.b1.empty() ? Disturbance() : build_disturbance(s.cfg, 1);
        const FullPdeResult full = simulate_switching_full_pde(s.plant, *s.basis, cert.K, tc, pd, pc);
        write_norm_csv(full.field.times, full.field.l2norms, out_path(c, "pde_closed_norm.csv"));
        write_field_heatmap_csv(full.field, out_path(c, "pde_closed_field.csv"));
        write_closed_loop_csv(full.loop, out_path(c, "pde_closed_loop.csv"));
        std::cout << "full PDE: |xi|(0) = " << full.field.l2norms[0]
                  << ", |xi|(T) = " << full.field.l2norms[full.field.steps() - 1] << ", "
                  << trigger_summary(full.loop) << "\n";
        for (const auto& n : full.field.notes) std::cerr << "note: " << n << "\n";
      }
    } else if (*verify) {
      require_file(certificate, "certificate");
      const ControllerCertificate cert = read_certificate(certificate);
      const VerifyReport r = verify_certificate(cert, parse_verify_mode(mode));
      std::cout << r.summary() << "\n";
      return r.pass ? 0 : kAssertion;
    } else if (*run) {
      const ExperimentConfig cfg = load(c);
      const PipelineReport r = run_pipeline(cfg, c.out_dir);
      std::cout << r.table();
      std::ifstream summary(out_path(c, "trigger_summary.txt"));
      if (summary) std::cout << summary.rdbuf();
      return r.hard_failure() ? kAssertion : 0;
    } else if (*exporter) {
      for (const auto& t : traces) require_file(t, "trace");
      for (const auto& f : export_plots_data(traces, c.out_dir)) std::cout << f << "\n";
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
