#include "pdeetc/mnn.hpp"

#include "pdeetc/error.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>

namespace pdeetc {

void Mnn::validate() const {
  const Eigen::Index nh = W.cols();
  if (V.rows() != nh || q.size() != nh || r.size() != nh)
    throw Error(ErrorKind::InvalidArgument, "network dimensions are inconsistent");
  if ((q.array() <= 0.0).any() || (r.array() <= 0.0).any())
    throw Error(ErrorKind::InvalidArgument, "activation parameters q, r must be positive");
}

double activation(double s, double q, double r) {
  // q (2 / (1 + e^{-s/r}) - 1) == q tanh(s / 2r)
  return q * std::tanh(0.5 * s / r);
}

Vec activation_vec(const Vec& s, const Vec& q, const Vec& r) {
  Vec out(s.size());
  for (Eigen::Index i = 0; i < s.size(); ++i) out[i] = activation(s[i], q[i], r[i]);
  return out;
}

double activation_derivative(double s, double q, double r) {
  const double t = std::tanh(0.5 * s / r);
  return 0.5 * q / r * (1.0 - t * t);
}

double activation_integral(double s, double q, double r) {
  const double z = s / r;
  const double softplus = std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z)));
  return q * (2.0 * r * softplus - s - 2.0 * r * std::log(2.0));
}

Vec Mnn::hidden_output(const Vec& xi) const { return activation_vec(V * xi, q, r); }

Vec forward(const Mnn& net, const Vec& xi) { return net.W * net.hidden_output(xi); }

Mnn init_mnn(int m, int hidden, double q, double r, std::uint64_t seed) {
  if (m < 1 || hidden < 1) throw Error(ErrorKind::InvalidArgument, "network sizes must be >= 1");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Mnn net;
  net.W.resize(m, hidden);
  net.V.resize(hidden, m);
  for (int i = 0; i < m; ++i)
    for (int k = 0; k < hidden; ++k) net.W(i, k) = u(rng);
  for (int k = 0; k < hidden; ++k)
    for (int j = 0; j < m; ++j) net.V(k, j) = u(rng);
  net.q = Vec::Constant(hidden, q);
  net.r = Vec::Constant(hidden, r);
  net.validate();
  return net;
}

SectorBounds sector_bounds(const Mnn& net) {
  SectorBounds sb;
  sb.g_min = Vec::Zero(net.hidden());
  sb.g_max = (0.5 * net.q.array() / net.r.array()).matrix();
  return sb;
}

// ---------------------------------------------------------------- sampling

PdeSampler::PdeSampler(PlantModel plant, BasisPtr basis, int grid_n, int substeps, int sensors)
    : plant_(std::move(plant)), basis_(std::move(basis)), grid_n_(grid_n), substeps_(substeps) {
  if (!basis_) throw Error(ErrorKind::InvalidArgument, "null basis");
  if (sensors < basis_->m) throw Error(ErrorKind::InvalidArgument, "need at least m sensors");
  grid_ = uniform_grid(plant_.spec.domain, grid_n_);
  sensors_.resize(sensors);
  for (int s = 0; s < sensors; ++s) {
    const Eigen::Index idx = 1 + static_cast<Eigen::Index>(std::llround((grid_n_ - 3.0) * (s + 0.5) / sensors));
    sensor_index_.push_back(idx);
    sensors_[s] = grid_[idx];
  }
}

Vec PdeSampler::measure(const Vec& field) const {
  Vec samples(static_cast<Eigen::Index>(sensor_index_.size()));
  for (size_t s = 0; s < sensor_index_.size(); ++s) samples[static_cast<Eigen::Index>(s)] = field[sensor_index_[s]];
  return reconstruct_slow_state(samples, *basis_, sensors_);
}

Vec PdeSampler::advance(const Vec& xi, double dt) const {
  Vec init(grid_n_);
  for (int i = 0; i < grid_n_; ++i) init[i] = basis_->field(xi, grid_[i]);
  PdeSimConfig cfg;
  cfg.grid_n = grid_n_;
  cfg.dt = dt / substeps_;
  cfg.T = dt;
  cfg.stride = substeps_;
  const FieldTrace tr = simulate_from(plant_, init, nullptr, Disturbance(), cfg);
  return measure(tr.fields.row(tr.fields.rows() - 1).transpose());
}

SlowModelSampler::SlowModelSampler(Mat A, SlowMap fs, int substeps)
    : A_(std::move(A)), fs_(std::move(fs)), substeps_(substeps) {}

Vec SlowModelSampler::advance(const Vec& xi, double dt) const {
  Vec x = xi;
  const double h = dt / substeps_;
  auto rhs = [&](const Vec& s) -> Vec { return A_ * s + fs_(s); };
  for (int k = 0; k < substeps_; ++k) {
    const Vec k1 = rhs(x);
    const Vec k2 = rhs(x + 0.5 * h * k1);
    const Vec k3 = rhs(x + 0.5 * h * k2);
    const Vec k4 = rhs(x + h * k3);
    x += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return x;
}

SlowMap galerkin_nonlinearity(const Polynomial& f, BasisPtr basis) {
  return [f, basis](const Vec& xi) {
    const Eigen::Index nq = basis->quadrature.nodes.size();
    const Eigen::Index m = xi.size();
    Vec vals(nq);
    for (Eigen::Index i = 0; i < nq; ++i) vals[i] = f(basis->phi_nodes.row(i).head(m).dot(xi));
    const Vec wq = basis->quadrature.weights.cwiseProduct(basis->weight_nodes).cwiseProduct(vals);
    Vec out(m);
    for (Eigen::Index j = 0; j < m; ++j) out[j] = basis->phi_nodes.col(j).dot(wq);
    return out;
  };
}

Mat box_grid(const Vec& lo, const Vec& hi, double spacing) {
  if (lo.size() != hi.size() || lo.size() < 1) throw Error(ErrorKind::InvalidArgument, "region bounds mismatch");
  if (!(spacing > 0.0)) throw Error(ErrorKind::InvalidArgument, "grid spacing must be positive");
  const Eigen::Index m = lo.size();
  std::vector<long> counts(m);
  long total = 1;
  for (Eigen::Index j = 0; j < m; ++j) {
    if (hi[j] < lo[j]) throw Error(ErrorKind::InvalidArgument, "region bound hi < lo");
    counts[j] = std::lround(std::floor((hi[j] - lo[j]) / spacing + 1e-9)) + 1;
    total *= counts[j];
  }
  Mat pts(total, m);
  for (long n = 0; n < total; ++n) {
    long rem = n;
    for (Eigen::Index j = m - 1; j >= 0; --j) {
      pts(n, j) = lo[j] + spacing * static_cast<double>(rem % counts[j]);
      rem /= counts[j];
    }
  }
  return pts;
}

TrainingSet generate_targets(const SlowSampler& sampler, const Vec& lo, const Vec& hi, double spacing, double dTs,
                             const Mat& A) {
  if (!(dTs > 0.0)) throw Error(ErrorKind::InvalidArgument, "sampling interval must be positive");
  const Mat pts = box_grid(lo, hi, spacing);
  TrainingSet data;
  data.dTs = dTs;
  data.region_lo = lo;
  data.region_hi = hi;
  std::vector<Vec> xs, ts;
  for (Eigen::Index n = 0; n < pts.rows(); ++n) {
    const Vec x = pts.row(n).transpose();
    try {
      const Vec next = sampler.advance(x, dTs);
      if (!next.allFinite()) throw Error(ErrorKind::Divergence, "non-finite sample");
      xs.push_back(x);
      ts.push_back((next - x) / dTs - A * x);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::Divergence && e.kind() != ErrorKind::Solver) throw;
      ++data.discarded;
    }
  }
  if (data.discarded > 0)
    std::cerr << "warning: " << data.discarded << " training samples discarded (sampler divergence)\n";
  data.inputs.resize(static_cast<Eigen::Index>(xs.size()), lo.size());
  data.targets.resize(static_cast<Eigen::Index>(xs.size()), lo.size());
  for (size_t n = 0; n < xs.size(); ++n) {
    data.inputs.row(static_cast<Eigen::Index>(n)) = xs[n].transpose();
    data.targets.row(static_cast<Eigen::Index>(n)) = ts[n].transpose();
  }
  return data;
}

// ---------------------------------------------------------------- training

void LmConfig::validate() const {
  if (!(mu0 > 0.0) || !(eps_c > 0.0) || k_max < 1)
    throw Error(ErrorKind::InvalidArgument, "LM configuration values must be positive");
  if (!(damping_up > 1.0) || !(damping_down < 1.0) || !(damping_down > 0.0))
    throw Error(ErrorKind::InvalidArgument, "LM damping factors must satisfy up > 1 > down > 0");
}

Vec pack_parameters(const Mnn& net) {
  const Eigen::Index nw = net.W.size(), nv = net.V.size();
  Vec theta(nw + nv);
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < net.W.rows(); ++i)
    for (Eigen::Index j = 0; j < net.W.cols(); ++j) theta[k++] = net.W(i, j);
  for (Eigen::Index i = 0; i < net.V.rows(); ++i)
    for (Eigen::Index j = 0; j < net.V.cols(); ++j) theta[k++] = net.V(i, j);
  return theta;
}

Mnn unpack_parameters(const Mnn& shape, const Vec& theta) {
  Mnn net = shape;
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < net.W.rows(); ++i)
    for (Eigen::Index j = 0; j < net.W.cols(); ++j) net.W(i, j) = theta[k++];
  for (Eigen::Index i = 0; i < net.V.rows(); ++i)
    for (Eigen::Index j = 0; j < net.V.cols(); ++j) net.V(i, j) = theta[k++];
  return net;
}

namespace {

struct Batch {
  Mat mu;   // N x n_h
  Mat dmu;  // N x n_h
  Mat out;  // N x m
};

Batch evaluate_batch(const Mnn& net, const Mat& X, bool derivatives) {
  Batch b;
  const Mat Z = X * net.V.transpose();
  b.mu.resize(Z.rows(), Z.cols());
  if (derivatives) b.dmu.resize(Z.rows(), Z.cols());
  for (Eigen::Index k = 0; k < Z.cols(); ++k) {
    const double q = net.q[k], r = net.r[k];
    for (Eigen::Index n = 0; n < Z.rows(); ++n) {
      const double t = std::tanh(0.5 * Z(n, k) / r);
      b.mu(n, k) = q * t;
      if (derivatives) b.dmu(n, k) = 0.5 * q / r * (1.0 - t * t);
    }
  }
  b.out = b.mu * net.W.transpose();
  return b;
}

}  // namespace

Vec residuals(const Mnn& net, const TrainingSet& data) {
  const Mat E = evaluate_batch(net, data.inputs, false).out - data.targets;
  return E.reshaped();  // output-major: all samples of output 0, then output 1, ...
}

double training_loss(const Mnn& net, const TrainingSet& data) {
  if (data.size() == 0) throw Error(ErrorKind::InvalidArgument, "empty training set");
  return residuals(net, data).squaredNorm() / (2.0 * static_cast<double>(data.size()));
}

double training_mse(const Mnn& net, const TrainingSet& data) {
  const Vec e = residuals(net, data);
  return e.squaredNorm() / static_cast<double>(e.size());
}

Mat residual_jacobian(const Mnn& net, const TrainingSet& data) {
  const Eigen::Index n = data.size(), m = net.m(), nh = net.hidden(), nin = net.V.cols();
  const Eigen::Index nw = m * nh;
  const Batch b = evaluate_batch(net, data.inputs, true);
  Mat J = Mat::Zero(n * m, nw + nh * nin);
  for (Eigen::Index i = 0; i < m; ++i) {
    J.block(i * n, i * nh, n, nh) = b.mu;
    const Mat a = b.dmu * net.W.row(i).transpose().asDiagonal();  // N x n_h
    for (Eigen::Index k = 0; k < nh; ++k)
      for (Eigen::Index j = 0; j < nin; ++j)
        J.block(i * n, nw + k * nin + j, n, 1) = a.col(k).cwiseProduct(data.inputs.col(j));
  }
  return J;
}

Vec loss_gradient(const Mnn& net, const TrainingSet& data) {
  return residual_jacobian(net, data).transpose() * residuals(net, data) / static_cast<double>(data.size());
}

namespace {

TrainResult train_lm_joint(const Mnn& init, const TrainingSet& data, const LmConfig& cfg) {
  TrainResult res;
  res.net = init;
  Vec theta = pack_parameters(init);
  double loss = training_loss(init, data);
  res.loss_history.push_back(loss);
  double damping = cfg.mu0;
  for (int k = 0; k < cfg.k_max; ++k) {
    const Mnn cur = unpack_parameters(init, theta);
    const Mat J = residual_jacobian(cur, data);
    const Vec e = residuals(cur, data);
    Mat JtJ = Mat::Zero(J.cols(), J.cols());
    JtJ.selfadjointView<Eigen::Lower>().rankUpdate(J.transpose());
    JtJ = JtJ.selfadjointView<Eigen::Lower>();
    const Vec Jte = J.transpose() * e;
    bool accepted = false;
    while (damping <= cfg.damping_max) {
      Mat H = JtJ;
      H.diagonal().array() += damping;
      Eigen::LLT<Mat> llt(H);
      if (llt.info() == Eigen::Success) {
        const Vec step = llt.solve(Jte);
        const Vec trial = theta - step;
        const double trial_loss = training_loss(unpack_parameters(init, trial), data);
        if (std::isfinite(trial_loss) && trial_loss < loss) {
          theta = trial;
          const double change = loss - trial_loss;
          loss = trial_loss;
          damping *= cfg.damping_down;
          accepted = true;
          res.iterations = k + 1;
          res.loss_history.push_back(loss);
          if (change < cfg.eps_c) res.converged = true;
          break;
        }
      }
      damping *= cfg.damping_up;
    }
    if (!accepted) {
      // no descent direction left at any damping: stationary or stalled
      res.stalled = true;
      res.iterations = k + 1;
      break;
    }
    if (res.converged) break;
  }
  res.net = unpack_parameters(init, theta);
  return res;
}

}  // namespace

TrainResult train_lm(const Mnn& init, const TrainingSet& data, const LmConfig& cfg) {
  cfg.validate();
  init.validate();
  if (data.size() == 0) throw Error(ErrorKind::InvalidArgument, "empty training set");
  if (data.inputs.cols() != init.V.cols() || data.targets.cols() != init.m())
    throw Error(ErrorKind::InvalidArgument, "training data dimension does not match the network");
  if (!cfg.per_channel) return train_lm_joint(init, data, cfg);

  // one single-output network per channel, stacked into a block network
  const int m = init.m(), nh = init.hidden();
  Mnn joint;
  joint.W = Mat::Zero(m, m * nh);
  joint.V.resize(m * nh, m);
  joint.q.resize(m * nh);
  joint.r.resize(m * nh);
  TrainResult out;
  for (int i = 0; i < m; ++i) {
    Mnn sub;
    sub.W = init.W.row(i);
    sub.V = init.V;
    sub.q = init.q;
    sub.r = init.r;
    TrainingSet d = data;
    d.targets = data.targets.col(i);
    const TrainResult r = train_lm_joint(sub, d, cfg);
    joint.W.block(i, i * nh, 1, nh) = r.net.W;
    joint.V.middleRows(i * nh, nh) = r.net.V;
    joint.q.segment(i * nh, nh) = r.net.q;
    joint.r.segment(i * nh, nh) = r.net.r;
    out.iterations = std::max(out.iterations, r.iterations);
    out.stalled = out.stalled || r.stalled;
  }
  out.net = joint;
  out.converged = !out.stalled;
  out.loss_history = {training_loss(init, data), training_loss(joint, data)};
  return out;
}

TrainResult train_bp_baseline(const Mnn& init, const TrainingSet& data, double rate, int iters) {
  init.validate();
  if (data.size() == 0) throw Error(ErrorKind::InvalidArgument, "empty training set");
  TrainResult res;
  Vec theta = pack_parameters(init);
  res.loss_history.push_back(training_loss(init, data));
  for (int k = 0; k < iters; ++k) {
    const Mnn cur = unpack_parameters(init, theta);
    theta -= rate * loss_gradient(cur, data);
    const double loss = training_loss(unpack_parameters(init, theta), data);
    res.loss_history.push_back(loss);
    res.iterations = k + 1;
    if (!std::isfinite(loss) || loss > 1e12) {
      res.diverged = true;
      break;
    }
  }
  res.net = unpack_parameters(init, theta);
  return res;
}

double estimate_delta_raw(const Mnn& net, const SlowMap& true_f, const Mat& points) {
  double worst = 0.0;
  int used = 0;
  for (Eigen::Index n = 0; n < points.rows(); ++n) {
    const Vec x = points.row(n).transpose();
    const double nx = x.norm();
    if (nx < 1e-6) continue;
    worst = std::max(worst, (true_f(x) - forward(net, x)).norm() / nx);
    ++used;
  }
  if (used == 0) throw Error(ErrorKind::InvalidArgument, "no grid points outside the origin ball");
  return worst;
}

double estimate_delta(const Mnn& net, const SlowMap& true_f, const Vec& lo, const Vec& hi, double spacing) {
  return 1.1 * estimate_delta_raw(net, true_f, box_grid(lo, hi, spacing));
}

// ---------------------------------------------------------------- weight files

void write_weights_csv(const Mnn& net, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path);
  out << std::setprecision(17);
  auto block = [&](const char* name, const Mat& M) {
    out << "block," << name << ',' << M.rows() << ',' << M.cols() << '\n';
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
      for (Eigen::Index j = 0; j < M.cols(); ++j) out << (j ? "," : "") << M(i, j);
      out << '\n';
    }
  };
  block("W", net.W);
  block("V", net.V);
  block("q", net.q.transpose());
  block("r", net.r.transpose());
}

Mnn read_weights_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot read " + path);
  Mnn net;
  bool have_w = false, have_v = false, have_q = false, have_r = false;
  std::string line;
  auto split = [](const std::string& s) {
    std::vector<std::string> parts;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) parts.push_back(item);
    return parts;
  };
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto head = split(line);
    if (head.size() != 4 || head[0] != "block") throw Error(ErrorKind::Io, path + ": expected block header");
    const long rows = std::stol(head[2]), cols = std::stol(head[3]);
    Mat M(rows, cols);
    for (long i = 0; i < rows; ++i) {
      if (!std::getline(in, line)) throw Error(ErrorKind::Io, path + ": truncated block " + head[1]);
      const auto vals = split(line);
      if (static_cast<long>(vals.size()) != cols) throw Error(ErrorKind::Io, path + ": bad row in " + head[1]);
      for (long j = 0; j < cols; ++j) M(i, j) = std::stod(vals[static_cast<size_t>(j)]);
    }
    const std::string& name = head[1];
    if (name == "W") net.W = M, have_w = true;
    else if (name == "V") net.V = M, have_v = true;
    else if (name == "VT") net.V = M.transpose(), have_v = true;
    else if (name == "q") net.q = M.reshaped(), have_q = true;
    else if (name == "r") net.r = M.reshaped(), have_r = true;
    else throw Error(ErrorKind::Io, path + ": unknown block " + name);
  }
  if (!have_w || !have_v) throw Error(ErrorKind::Io, path + ": W and V blocks are required");
  if (!have_q) net.q = Vec::Ones(net.W.cols());
  if (!have_r) net.r = Vec::Ones(net.W.cols());
  net.validate();
  return net;
}

}  // namespace pdeetc
