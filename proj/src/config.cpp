#include "pdeetc/config.hpp"

#include "pdeetc/error.hpp"
#include "pdeetc/profiles.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <set>
#include <sstream>

namespace pdeetc {

using json = nlohmann::json;

namespace {

// Reads known keys from one object and rejects anything else.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw Error(ErrorKind::Config, path_ + " must be an object");
  }

  template <class T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    try {
      out = j_.at(key).get<T>();
    } catch (const json::exception& e) {
      throw Error(ErrorKind::Config, path_ + "." + key + ": " + e.what());
    }
  }

  const json* child(const char* key) {
    seen_.insert(key);
    return j_.contains(key) ? &j_.at(key) : nullptr;
  }

  std::string path(const char* key) const { return path_ + "." + key; }

  void finish() const {
    for (const auto& [k, v] : j_.items())
      if (!seen_.count(k)) throw Error(ErrorKind::Config, "unknown key '" + path_ + "." + k + "'");
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

BoundaryCondition read_bc(const json& j, const std::string& path) {
  Section s(j, path);
  BoundaryCondition bc;
  s.get("h1", bc.h1);
  s.get("h2", bc.h2);
  s.finish();
  return bc;
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Config, std::string("malformed JSON: ") + e.what());
  }
  ExperimentConfig cfg;
  Section top(root, "config");
  top.get("name", cfg.name);

  if (const json* j = top.child("plant")) {
    Section s(*j, "plant");
    auto& p = cfg.plant;
    std::vector<double> dom{p.domain.lo, p.domain.hi};
    s.get("domain", dom);
    if (dom.size() != 2) throw Error(ErrorKind::Config, "plant.domain needs two entries");
    p.domain = {dom[0], dom[1]};
    s.get("diffusion", p.diffusion);
    s.get("advection", p.advection);
    if (const json* bc = s.child("left")) p.left = read_bc(*bc, s.path("left"));
    if (const json* bc = s.child("right")) p.right = read_bc(*bc, s.path("right"));
    s.get("f", p.f);
    s.get("b2", p.b2);
    s.get("b1", p.b1);
    s.get("cbar", p.cbar);
    s.get("xi0", p.xi0);
    s.finish();
  }
  if (const json* j = top.child("reduction")) {
    Section s(*j, "reduction");
    auto& r = cfg.reduction;
    s.get("m", r.m);
    s.get("basis", r.basis);
    s.get("grid_n", r.grid_n);
    s.get("panels", r.panels);
    s.finish();
  }
  if (const json* j = top.child("identification")) {
    Section s(*j, "identification");
    auto& r = cfg.identification;
    s.get("n_h", r.n_h);
    s.get("q", r.q);
    s.get("r", r.r);
    s.get("dTs", r.dTs);
    s.get("region_lo", r.region_lo);
    s.get("region_hi", r.region_hi);
    s.get("spacing", r.spacing);
    s.get("seed", r.seed);
    s.get("sampler", r.sampler);
    s.get("mu0", r.lm.mu0);
    s.get("eps_c", r.lm.eps_c);
    s.get("k_max", r.lm.k_max);
    s.get("per_channel", r.lm.per_channel);
    s.get("bp_rate", r.bp_rate);
    s.finish();
  }
  if (const json* j = top.child("synthesis")) {
    Section s(*j, "synthesis");
    auto& r = cfg.synthesis;
    s.get("network", r.network);
    s.get("delta", r.delta);
    s.get("h", r.h);
    s.get("epsilon", r.epsilon);
    s.get("Lambda", r.Lambda);
    s.get("alpha", r.alpha);
    s.get("beta1", r.beta1);
    s.get("beta2", r.beta2);
    s.get("margin", r.margin);
    s.get("grid_search", r.grid_search);
    s.get("variant", r.variant);
    s.get("optimize_gamma", r.optimize_gamma);
    s.get("omega_rho", r.omega_rho);
    s.get("gamma_iterations", r.gamma_iterations);
    s.finish();
  }
  if (const json* j = top.child("simulation")) {
    Section s(*j, "simulation");
    auto& r = cfg.simulation;
    s.get("T", r.T);
    s.get("dt", r.dt);
    s.get("xi0_slow", r.xi0_slow);
    s.get("h_values", r.h_values);
    s.get("D1", r.D1);
    s.get("pde_grid_n", r.pde_grid_n);
    s.get("pde_dt", r.pde_dt);
    s.get("pde_stride", r.pde_stride);
    if (const json* d = s.child("disturbance")) {
      Section ds(*d, s.path("disturbance"));
      ds.get("kind", r.disturbance.kind);
      ds.get("amplitude", r.disturbance.amplitude);
      ds.get("seed", r.disturbance.seed);
      ds.get("band", r.disturbance.band);
      ds.finish();
    }
    s.finish();
  }
  top.finish();
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot read config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

void ExperimentConfig::validate() const {
  auto fail = [](const std::string& m) { throw Error(ErrorKind::Config, m); };
  if (!(plant.domain.hi > plant.domain.lo)) fail("plant.domain must be increasing");
  if (!(plant.diffusion > 0.0)) fail("plant.diffusion must be positive");
  if (plant.b2.empty() || plant.cbar.empty()) fail("plant needs b2 and cbar profiles");
  // every profile name must resolve before any computation starts
  std::vector<std::string> names = plant.b2;
  names.insert(names.end(), plant.b1.begin(), plant.b1.end());
  names.insert(names.end(), plant.cbar.begin(), plant.cbar.end());
  names.push_back(plant.xi0);
  if (!plant.advection.empty()) names.push_back(plant.advection);
  for (const auto& n : names) (void)builtin_profile(n, plant.domain);
  if (plant.f.empty() || plant.f[0] != 0.0) fail("plant.f must have a zero constant term");
  if (reduction.m < 1) fail("reduction.m must be >= 1");
  if (reduction.basis != "analytic" && reduction.basis != "fd") fail("reduction.basis must be 'analytic' or 'fd'");
  if (static_cast<int>(identification.region_lo.size()) != reduction.m ||
      static_cast<int>(identification.region_hi.size()) != reduction.m)
    fail("identification region must have m entries");
  if (identification.sampler != "slow" && identification.sampler != "pde")
    fail("identification.sampler must be 'slow' or 'pde'");
  if (identification.n_h < 1 || !(identification.spacing > 0.0) || !(identification.dTs > 0.0))
    fail("identification sizes must be positive");
  identification.lm.validate();
  if (!(synthesis.h >= 0.0) || !(synthesis.epsilon >= 0.0) || !(synthesis.Lambda > 0.0))
    fail("synthesis.h, epsilon must be >= 0 and Lambda > 0");
  (void)parse_variant(synthesis.variant);
  if (!simulation.xi0_slow.empty() && static_cast<int>(simulation.xi0_slow.size()) != reduction.m)
    fail("simulation.xi0_slow must have m entries");
  if (!(simulation.T > 0.0) || simulation.dt < 0.0) fail("simulation.T must be positive, dt >= 0");
  for (double h : simulation.h_values)
    if (!(h > 0.0)) fail("simulation.h_values must be positive");
  (void)parse_disturbance_kind(simulation.disturbance.kind);
}

PhiVariant parse_variant(const std::string& s) {
  if (s == "stability") return PhiVariant::Stability;
  if (s == "no-disturbance") return PhiVariant::NoDisturbance;
  throw Error(ErrorKind::Config, "unknown synthesis variant '" + s + "'");
}

PlantModel build_plant(const ExperimentConfig& cfg) {
  const auto& s = cfg.plant;
  PlantModel p;
  p.spec.domain = s.domain;
  const double k = s.diffusion;
  p.spec.z2 = [k](double) { return k; };
  if (!s.advection.empty()) p.spec.z1 = builtin_profile(s.advection, s.domain);
  p.spec.left = s.left;
  p.spec.right = s.right;
  p.f.coeffs = s.f;
  for (const auto& n : s.b2) p.b2.push_back(builtin_profile(n, s.domain));
  for (const auto& n : s.b1) p.b1.push_back(builtin_profile(n, s.domain));
  for (const auto& n : s.cbar) p.cbar.push_back(builtin_profile(n, s.domain));
  p.xi0 = builtin_profile(s.xi0, s.domain);
  p.D1 = cfg.simulation.D1;
  p.validate();
  return p;
}

BasisPtr build_basis(const ExperimentConfig& cfg) {
  const PlantModel plant = build_plant(cfg);
  const auto& r = cfg.reduction;
  if (r.basis == "analytic") return std::make_shared<const ModalBasis>(analytic_dirichlet_basis(plant.spec, r.m, r.panels));
  return std::make_shared<const ModalBasis>(eigensolve_sturm_liouville(plant.spec, r.grid_n, r.m));
}

Disturbance build_disturbance(const ExperimentConfig& cfg, int channels) {
  const auto& d = cfg.simulation.disturbance;
  return Disturbance(parse_disturbance_kind(d.kind), d.amplitude, std::max(channels, 1), d.seed, d.band);
}

}  // namespace pdeetc
