#pragma once

#include "pdeetc/disturbance.hpp"
#include "pdeetc/galerkin.hpp"
#include "pdeetc/mnn.hpp"
#include "pdeetc/pde_sim.hpp"
#include "pdeetc/synthesis.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace pdeetc {

struct PlantSection {
  Interval domain{0.0, 3.141592653589793};
  double diffusion = 1.0;
  std::string advection;  // profile name; empty = none
  BoundaryCondition left, right;
  std::vector<double> f{0.0};
  std::vector<std::string> b2, b1, cbar;
  std::string xi0 = "zero";
};

struct ReductionSection {
  int m = 2;
  std::string basis = "analytic";  // analytic | fd
  int grid_n = 2000;               // fd eigensolve grid
  int panels = 64;
};

struct IdentificationSection {
  int n_h = 15;
  double q = 1.0;
  double r = 1.0;
  double dTs = 1e-3;
  std::vector<double> region_lo{0.0, 0.0};
  std::vector<double> region_hi{2.0, 2.0};
  double spacing = 0.1;
  std::uint64_t seed = 1;
  std::string sampler = "slow";  // slow | pde
  LmConfig lm{1e-3, 1e-14, 3000};
  double bp_rate = 0.01;
};

struct SynthesisSection {
  std::string network = "trained";  // trained | table1 | table4 | <weights csv>
  double delta = -1.0;              // < 0: use the identification estimate
  double h = 0.11;
  double epsilon = 0.01;
  double Lambda = 1.0;              // Lambda = value * I
  double alpha = 0.1;
  double beta1 = 1.0;
  double beta2 = 1.11;
  double margin = 1e-6;
  bool grid_search = true;
  std::string variant = "stability";  // stability | no-disturbance
  bool optimize_gamma = false;
  double omega_rho = 1e-3;
  int gamma_iterations = 20;
};

struct DisturbanceSection {
  std::string kind = "decaying-sine";
  double amplitude = 0.1;
  std::uint64_t seed = 0;
  double band = 10.0;
};

struct SimulationSection {
  double T = 10.0;
  double dt = 0.0;                // 0 -> h / 100
  std::vector<double> xi0_slow;   // empty -> projection of the plant's xi0
  std::vector<double> h_values;   // trigger comparison; empty -> {synthesis.h}
  DisturbanceSection disturbance;
  double D1 = 0.1;
  int pde_grid_n = 256;
  double pde_dt = 1e-3;
  int pde_stride = 10;
};

/// One experiment; parsed from a JSON file whose unknown keys are rejected.
struct ExperimentConfig {
  std::string name = "experiment";
  PlantSection plant;
  ReductionSection reduction;
  IdentificationSection identification;
  SynthesisSection synthesis;
  SimulationSection simulation;

  void validate() const;
};

ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);

PlantModel build_plant(const ExperimentConfig& cfg);
BasisPtr build_basis(const ExperimentConfig& cfg);
Disturbance build_disturbance(const ExperimentConfig& cfg, int channels);
PhiVariant parse_variant(const std::string& s);

}  // namespace pdeetc
