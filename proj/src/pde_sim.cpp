#include "pdeetc/pde_sim.hpp"

#include "pdeetc/fd_operator.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace pdeetc {

void PlantModel::validate() const {
  spec.validate();
  if (!f.zero_at_origin()) throw Error(ErrorKind::InvalidArgument, "nonlinearity must satisfy f(0) = 0");
  if (cbar.empty()) throw Error(ErrorKind::InvalidArgument, "plant needs at least one output profile");
  if (D1 < 0.0) throw Error(ErrorKind::InvalidArgument, "D1 must be non-negative");
}

Vec output(const Vec& field, const std::vector<Profile>& cbar, const Vec& grid) {
  if (field.size() != grid.size()) throw Error(ErrorKind::InvalidArgument, "field and grid differ in size");
  const Vec w = uniform_grid_weights(grid);
  Vec y(static_cast<Eigen::Index>(cbar.size()));
  for (size_t c = 0; c < cbar.size(); ++c) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < grid.size(); ++i) s += w[i] * cbar[c](grid[i]) * field[i];
    y[static_cast<Eigen::Index>(c)] = s;
  }
  return y;
}

double spatial_l2_norm(const Vec& field, const Vec& grid) {
  if (field.size() != grid.size()) throw Error(ErrorKind::InvalidArgument, "field and grid differ in size");
  const Vec w = uniform_grid_weights(grid);
  return std::sqrt(std::max(0.0, w.dot(field.cwiseAbs2())));
}

Vec project_field(const Vec& field, const Vec& grid, const ModalBasis& basis, int count) {
  const Vec w = uniform_grid_weights(grid);
  Vec out = Vec::Zero(count);
  for (Eigen::Index i = 0; i < grid.size(); ++i) {
    const double wi = w[i] * field[i] * (basis.weight ? basis.weight(grid[i]) : 1.0);
    for (int j = 0; j < count; ++j) out[j] += wi * basis.phi(j, grid[i]);
  }
  return out;
}

namespace {

struct Stepper {
  const PlantModel& plant;
  FdOperator op;
  Vec sub, diag, super;  // M - dt K
  Mat b2_nodes, b1_nodes;
  Vec out_weights;       // quadrature weights x cbar, one column per output
  Mat cbar_w;
  double dt;

  Stepper(const PlantModel& p, int grid_n, double step) : plant(p), op(build_fd_operator(p.spec, grid_n)), dt(step) {
    const int n = op.unknowns();
    diag = op.mass - dt * op.diag;
    sub = -dt * op.off;
    super = sub;
    b2_nodes.resize(grid_n, static_cast<Eigen::Index>(p.b2.size()));
    b1_nodes.resize(grid_n, static_cast<Eigen::Index>(p.b1.size()));
    for (int i = 0; i < grid_n; ++i) {
      for (size_t c = 0; c < p.b2.size(); ++c) b2_nodes(i, static_cast<Eigen::Index>(c)) = p.b2[c](op.grid[i]);
      for (size_t c = 0; c < p.b1.size(); ++c) b1_nodes(i, static_cast<Eigen::Index>(c)) = p.b1[c](op.grid[i]);
    }
    const Vec w = uniform_grid_weights(op.grid);
    cbar_w.resize(static_cast<Eigen::Index>(p.cbar.size()), grid_n);
    for (size_t c = 0; c < p.cbar.size(); ++c)
      for (int i = 0; i < grid_n; ++i) cbar_w(static_cast<Eigen::Index>(c), i) = w[i] * p.cbar[c](op.grid[i]);
    (void)n;
  }

  Vec measure(const Vec& field) const { return cbar_w * field; }

  void step(Vec& field, const Vec& u, const Vec& d) const {
    const int n = op.unknowns();
    Vec src = b2_nodes * u + b1_nodes * d;
    Vec rhs(n);
    for (int k = 0; k < n; ++k) {
      const int i = op.first + k;
      rhs[k] = op.mass[k] * (field[i] + dt * (plant.f(field[i]) + src[i]));
    }
    const Vec next = solve_tridiagonal(sub, diag, super, rhs);
    field.setZero();
    field.segment(op.first, n) = next;
  }
};

}  // namespace

FieldTrace simulate_from(const PlantModel& plant, const Vec& initial_field, const OutputController& controller,
                         const Disturbance& disturbance, const PdeSimConfig& cfg) {
  plant.validate();
  if (cfg.grid_n < 64) throw Error(ErrorKind::InvalidArgument, "grid_n must be >= 64");
  if (!(cfg.dt > 0.0) || !(cfg.T > 0.0) || cfg.stride < 1)
    throw Error(ErrorKind::InvalidArgument, "dt, T must be positive and stride >= 1");
  if (initial_field.size() != cfg.grid_n) throw Error(ErrorKind::InvalidArgument, "initial field size mismatch");

  // explicit-term stability: dt * sup|f'| over the initial range must stay well below 1
  const double range = std::max(1.0, 2.0 * initial_field.cwiseAbs().maxCoeff());
  const double lip = sampled_lipschitz(plant.f, range);
  if (cfg.dt * lip > 0.5)
    throw Error(ErrorKind::InvalidArgument, "dt violates the explicit-term stability bound (dt*L = " +
                                                std::to_string(cfg.dt * lip) + ")");

  const Stepper stepper(plant, cfg.grid_n, cfg.dt);
  const int n_u = static_cast<int>(plant.b2.size());
  auto trace = std::make_shared<FieldTrace>();
  trace->grid = stepper.op.grid;
  Vec field = initial_field;
  if (stepper.op.first == 1 || stepper.op.last == cfg.grid_n - 2) {
    const double left = field[0], right = field[cfg.grid_n - 1];
    if (stepper.op.first == 1) field[0] = 0.0;
    if (stepper.op.last == cfg.grid_n - 2) field[cfg.grid_n - 1] = 0.0;
    if ((stepper.op.first == 1 && left != 0.0) || (stepper.op.last == cfg.grid_n - 2 && right != 0.0)) {
      std::ostringstream os;
      os << std::setprecision(6) << "initial profile violates the Dirichlet condition (xi0(lo)=" << left
         << ", xi0(hi)=" << right << "); boundary values set to zero";
      trace->notes.push_back(os.str());
    }
  }

  const long n_steps = std::lround(cfg.T / cfg.dt);
  std::vector<double> times, norms;
  std::vector<Vec> fields, outputs;
  auto record = [&](double t, const Vec& y) {
    times.push_back(t);
    norms.push_back(spatial_l2_norm(field, trace->grid));
    outputs.push_back(y);
    if (cfg.store_fields) fields.push_back(field);
  };
  auto flush = [&] {
    const Eigen::Index rows = static_cast<Eigen::Index>(times.size());
    trace->times = Eigen::Map<const Vec>(times.data(), rows);
    trace->l2norms = Eigen::Map<const Vec>(norms.data(), rows);
    trace->outputs.resize(rows, static_cast<Eigen::Index>(plant.cbar.size()));
    for (Eigen::Index r = 0; r < rows; ++r) trace->outputs.row(r) = outputs[r].transpose();
    trace->fields.resize(cfg.store_fields ? rows : 0, cfg.grid_n);
    if (cfg.store_fields)
      for (Eigen::Index r = 0; r < rows; ++r) trace->fields.row(r) = fields[r].transpose();
  };

  for (long k = 0; k <= n_steps; ++k) {
    const double t = k * cfg.dt;
    const Vec y = stepper.measure(field);
    if (k % cfg.stride == 0 || k == n_steps) record(t, y);
    if (k == n_steps) break;
    const Vec u = controller ? controller(t, y) : Vec::Zero(n_u);
    if (u.size() != n_u) throw Error(ErrorKind::InvalidArgument, "controller returned wrong input size");
    const Vec d = plant.b1.empty() ? Vec() : disturbance(t);
    stepper.step(field, u, plant.b1.empty() ? Vec::Zero(0) : d);
    if (!field.allFinite()) {
      flush();
      throw Error(ErrorKind::Solver, "non-finite field value at t=" + std::to_string(t + cfg.dt));
    }
    if (field.cwiseAbs().maxCoeff() > cfg.overflow) {
      record(t + cfg.dt, stepper.measure(field));
      flush();
      throw DivergenceError("field exceeded overflow guard at t=" + std::to_string(t + cfg.dt), trace);
    }
  }
  flush();
  return std::move(*trace);
}

FieldTrace simulate(const PlantModel& plant, const OutputController& controller, const Disturbance& disturbance,
                    const PdeSimConfig& cfg) {
  const Vec grid = uniform_grid(plant.spec.domain, cfg.grid_n);
  Vec init(cfg.grid_n);
  for (int i = 0; i < cfg.grid_n; ++i) init[i] = plant.xi0 ? plant.xi0(grid[i]) : 0.0;
  return simulate_from(plant, init, controller, disturbance, cfg);
}

void write_field_trace_csv(const FieldTrace& trace, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path);
  out << std::setprecision(17) << "t";
  for (Eigen::Index c = 0; c < trace.outputs.cols(); ++c) out << ",y" << (c + 1);
  out << ",norm\n";
  for (Eigen::Index r = 0; r < trace.steps(); ++r) {
    out << trace.times[r];
    for (Eigen::Index c = 0; c < trace.outputs.cols(); ++c) out << ',' << trace.outputs(r, c);
    out << ',' << trace.l2norms[r] << '\n';
  }
}

void write_field_binary(const FieldTrace& trace, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path);
  const std::int64_t header[2] = {static_cast<std::int64_t>(trace.fields.cols()),
                                  static_cast<std::int64_t>(trace.fields.rows())};
  out.write(reinterpret_cast<const char*>(header), sizeof(header));
  for (Eigen::Index r = 0; r < trace.fields.rows(); ++r)
    for (Eigen::Index c = 0; c < trace.fields.cols(); ++c) {
      const double v = trace.fields(r, c);
      out.write(reinterpret_cast<const char*>(&v), sizeof(v));
    }
}

}  // namespace pdeetc
