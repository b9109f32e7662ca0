#pragma once

#include "pdeetc/disturbance.hpp"
#include "pdeetc/error.hpp"
#include "pdeetc/galerkin.hpp"
#include "pdeetc/profiles.hpp"

#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace pdeetc {

/// Full distributed-parameter plant
///   xi_t = A xi + f(xi) + b2(p) u + b1(p) d,   y = int cbar xi dp.
struct PlantModel {
  SturmLiouvilleSpec spec;
  Polynomial f;
  std::vector<Profile> b2;
  std::vector<Profile> b1;
  std::vector<Profile> cbar;
  Profile xi0;
  double D1 = 0.1;

  void validate() const;
};

struct FieldTrace {
  Vec times;
  Vec grid;
  Mat fields;    // stored steps x grid nodes
  Mat outputs;   // stored steps x n_y
  Vec l2norms;
  std::vector<std::string> notes;

  Eigen::Index steps() const { return times.size(); }
};

/// Raised when the field exceeds the overflow guard; carries the trace so far.
class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& what, std::shared_ptr<FieldTrace> partial)
      : Error(ErrorKind::Divergence, what), partial_(std::move(partial)) {}
  const FieldTrace& partial() const { return *partial_; }

 private:
  std::shared_ptr<FieldTrace> partial_;
};

struct PdeSimConfig {
  int grid_n = 256;
  double dt = 1e-3;
  double T = 10.0;
  int stride = 10;
  bool store_fields = true;
  double overflow = 1e6;
};

/// (t, y) -> u, called once per step with the measured output.
using OutputController = std::function<Vec(double, const Vec&)>;

/// IMEX method of lines: the operator is taken implicitly (tridiagonal solve),
/// nonlinearity and inputs explicitly.
FieldTrace simulate(const PlantModel& plant, const OutputController& controller,
                    const Disturbance& disturbance, const PdeSimConfig& cfg);

/// Same stepping from an explicit initial field given on the uniform grid.
FieldTrace simulate_from(const PlantModel& plant, const Vec& initial_field,
                         const OutputController& controller, const Disturbance& disturbance,
                         const PdeSimConfig& cfg);

/// y_c = int cbar_c(p) field(p) dp on a uniform grid.
Vec output(const Vec& field, const std::vector<Profile>& cbar, const Vec& grid);

double spatial_l2_norm(const Vec& field, const Vec& grid);

/// Projection of a stored field onto the first `count` modes (quadrature on the field grid).
Vec project_field(const Vec& field, const Vec& grid, const ModalBasis& basis, int count);

/// CSV with columns t, y..., norm.
void write_field_trace_csv(const FieldTrace& trace, const std::string& path);
/// Binary dump: int64 grid_n, int64 n_steps, then row-major little-endian doubles.
void write_field_binary(const FieldTrace& trace, const std::string& path);

}  // namespace pdeetc
