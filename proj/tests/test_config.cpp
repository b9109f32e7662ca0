#include "pdeetc/config.hpp"
#include "pdeetc/error.hpp"
#include "pdeetc/examples.hpp"
#include "pdeetc/pipeline.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace pdeetc;
namespace fs = std::filesystem;

#ifndef PDEETC_SOURCE_DIR
#define PDEETC_SOURCE_DIR "."
#endif

namespace {

ErrorKind kind_of(const std::string& text) {
  try {
    (void)parse_config(text);
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::Assertion;  // parsed: not what these cases expect
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const char* kMinimal = R"({"plant": {"b2": ["example1.b2.1"], "cbar": ["example1.cbar"]}})";

}  // namespace

TEST_CASE("bundled configurations parse", "[config]") {
  for (const char* name : {"example1.json", "example2.json"}) {
    const ExperimentConfig cfg = load_config(std::string(PDEETC_SOURCE_DIR) + "/configs/" + name);
    CHECK(cfg.reduction.m == 2);
    CHECK_NOTHROW(build_plant(cfg));
  }
}

TEST_CASE("config errors are reported before any computation", "[config]") {
  CHECK(kind_of(R"({"plant": {"b2": ["example1.b2.1"], "cbar": ["example1.cbar"], "diffusivity": 1}})") == ErrorKind::Config);
  CHECK(kind_of(R"({"simulaton": {}})") == ErrorKind::Config);
  CHECK(kind_of(R"({"plant": {"b2": ["no_such_profile"], "cbar": ["example1.cbar"]}})") != ErrorKind::Assertion);
  CHECK(kind_of(R"({"plant": {"b2": ["example1.b2.1"], "cbar": ["example1.cbar"], "f": [1.0]}})") == ErrorKind::Config);
  CHECK(kind_of(R"({"plant": )") == ErrorKind::Config);
  CHECK(kind_of(R"({"plant": {"b2": ["example1.b2.1"], "cbar": ["example1.cbar"]}, "synthesis": {"variant": "x"}})") ==
        ErrorKind::Config);
}

TEST_CASE("trigger comparison artifacts are byte-identical across reruns", "[config][determinism]") {
  const ExperimentConfig cfg = load_config(std::string(PDEETC_SOURCE_DIR) + "/configs/example1.json");
  const PlantModel plant = build_plant(cfg);
  const BasisPtr basis = build_basis(cfg);
  const SlowSystem sys = assemble_slow_system(basis, plant.b2, plant.b1, plant.cbar);
  const ClosedLoopModel model = make_closed_loop_model(sys, table1_network());
  Mat K(2, 1);
  K << -1.0, 0.5;
  EtcSimConfig sim;
  sim.T = 2.0;
  sim.xi0 = slow_initial_state(cfg, plant, *basis);
  const Disturbance d = build_disturbance(cfg, sys.n_d());
  const fs::path a = fs::temp_directory_path() / "pdeetc_det_a", b = fs::temp_directory_path() / "pdeetc_det_b";
  fs::create_directories(a);
  fs::create_directories(b);
  (void)compare_triggers(model, K, 0.01, Mat::Identity(1, 1), d, sim, {0.11}, a.string());
  (void)compare_triggers(model, K, 0.01, Mat::Identity(1, 1), d, sim, {0.11}, b.string());
  int files = 0;
  for (const auto& e : fs::directory_iterator(a)) {
    ++files;
    CHECK(slurp(e.path()) == slurp(b / e.path().filename()));
  }
  CHECK(files >= 2);
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("minimal config takes defaults", "[config]") {
  const ExperimentConfig cfg = parse_config(kMinimal);
  CHECK(cfg.synthesis.h == 0.11);
  CHECK(cfg.reduction.basis == "analytic");
}
