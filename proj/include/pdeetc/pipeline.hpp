#pragma once

#include "pdeetc/config.hpp"
#include "pdeetc/etc_sim.hpp"

#include <string>
#include <vector>

namespace pdeetc {

struct IdentificationResult {
  Mnn net;
  TrainResult lm;
  double mse = 0.0;
  double delta = 0.0;
  double bp_loss = 0.0;  // baseline loss after lm.iterations gradient steps
  double lm_loss = 0.0;
  long samples = 0;
};

/// Training data, LM fit, BP baseline at equal iterations and the residual bound.
IdentificationResult identify(const ExperimentConfig& cfg, const PlantModel& plant, BasisPtr basis,
                              const SlowSystem& sys);
void write_identification_json(const IdentificationResult& r, const std::string& path);

/// Network named by synthesis.network; `trained` may be null unless the name is "trained".
Mnn synthesis_network(const ExperimentConfig& cfg, const Mnn* trained);
SynthesisParams synthesis_params(const ExperimentConfig& cfg, const SlowSystem& sys, const Mnn& net, double delta);
SynthesisOptions synthesis_options(const ExperimentConfig& cfg);

/// Slow initial state: simulation.xi0_slow, or the projection of the plant's xi0.
Vec slow_initial_state(const ExperimentConfig& cfg, const PlantModel& plant, const ModalBasis& basis);

struct TriggerComparison {
  double h = 0.0;
  TriggerStats switching;
  TriggerStats static_mode;
  bool static_zeno = false;
};

/// Switching vs static runs for every h (dt = h/100 in both loops).
std::vector<TriggerComparison> compare_triggers(const ClosedLoopModel& model, const Mat& K, double epsilon,
                                                const Mat& Lambda, const Disturbance& d, const EtcSimConfig& sim,
                                                const std::vector<double>& h_values,
                                                const std::string& csv_dir = "");
std::string trigger_table(const std::vector<TriggerComparison>& rows);

struct CheckRow {
  std::string name;
  bool pass = false;
  bool hard = false;  // hard assertions make the run exit nonzero
  std::string detail;
};

struct PipelineReport {
  std::vector<CheckRow> checks;
  std::vector<std::string> artifacts;
  bool hard_failure() const;
  std::string table() const;
};

/// basis -> slow system -> identify -> synthesize (-> gamma) -> simulate switching,
/// static and full PDE; writes every artifact into out_dir.
PipelineReport run_pipeline(const ExperimentConfig& cfg, const std::string& out_dir);

/// Plot-ready CSVs from closed-loop trace files: <stem>_norm, _triggers, _u, _e, _y.
std::vector<std::string> export_plots_data(const std::vector<std::string>& trace_files, const std::string& out_dir);
/// Long-format (t, p, value) field heatmap, every `every`-th node.
void write_field_heatmap_csv(const FieldTrace& trace, const std::string& path, int every = 4);
void write_norm_csv(const Vec& times, const Vec& norms, const std::string& path);

}  // namespace pdeetc
