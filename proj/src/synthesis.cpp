#include "pdeetc/synthesis.hpp"

#include "pdeetc/error.hpp"

#include <nlohmann/json.hpp>

#include <Eigen/Eigenvalues>

#include <cmath>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>

namespace pdeetc {

PhiVariables ControllerCertificate::variables() const {
  PhiVariables v = constant_variables(P, U, Q1, Q2, M1, M2, M3, N, L, Omega, params.B2, K, rho);
  return v;
}

namespace {

struct Problem {
  VariableSet vs;
  PhiVariables v;
  AffineMat P;
  std::vector<LmiConstraint> cons;
  bool hinf = false;
};

Problem build_problem(const SynthesisParams& p, const Mat* ratio, const Mat* fixed_k, bool hinf, PhiVariant variant) {
  Problem pr;
  pr.hinf = hinf;
  const Eigen::Index m = p.m(), nh = p.n_h(), ny = p.n_y();
  auto& vs = pr.vs;
  pr.P = vs.symmetric("P", 2 * m);
  PhiVariables& v = pr.v;
  v.P11 = pr.P.block(0, 0, m, m);
  v.P12 = pr.P.block(0, m, m, m);
  v.P22 = pr.P.block(m, m, m, m);
  v.U = vs.symmetric("U", m);
  v.Q1 = vs.full("Q1", m, m);
  v.Q2 = vs.full("Q2", m, m);
  v.M1 = vs.full("M1", m, m);
  v.M2 = vs.full("M2", m, m);
  v.M3 = vs.full("M3", m, m);
  v.L = vs.diagonal("L", nh);
  v.Omega = vs.diagonal("Omega", nh);
  v.N = ratio ? (*ratio) * v.P11 : vs.full("N", m, m);
  if (fixed_k) {
    v.Xi2 = v.P11 * Mat(p.B2 * (*fixed_k));
    v.Xi1 = v.N * Mat(p.B2 * (*fixed_k));
  } else {
    v.Xi2 = vs.full("Xi2", m, ny);
    v.Xi1 = ratio ? (*ratio) * v.Xi2 : vs.full("Xi1", m, ny);
  }
  v.rho = hinf ? vs.scalar("rho") : AffineMat(Mat::Zero(1, 1));

  pr.cons.push_back({"xi_tilde", assemble_xi_tilde(v.P11, v.P12, v.P22, v.Q1, v.Q2, p.h), Sense::PositiveDefinite});
  pr.cons.push_back({"P", pr.P, Sense::PositiveDefinite});
  pr.cons.push_back({"U", v.U, Sense::PositiveDefinite});
  pr.cons.push_back({"L", v.L, Sense::PositiveDefinite});
  pr.cons.push_back({"Omega", v.Omega, Sense::PositiveDefinite});
  for (int k = 1; k <= 4; ++k)
    pr.cons.push_back({"phi" + std::to_string(k), assemble_lmi_phi_tilde(k, p, v, variant).matrix,
                       Sense::NegativeDefinite});
  if (hinf) {
    pr.cons.push_back({"rho", v.rho, Sense::PositiveDefinite});
    for (int k = 5; k <= 8; ++k)
      pr.cons.push_back({"phi" + std::to_string(k), assemble_hinf(k, p, v, true).matrix, Sense::NegativeDefinite});
  }
  return pr;
}

SdpResult solve(const Problem& pr, const SdpOptions& opt) {
  Vec objective;
  if (pr.hinf) {
    objective = Vec::Zero(pr.vs.size());
    objective[pr.vs.info("rho").offset] = 1.0;
  }
  return sdp_solve(pr.vs.size(), pr.cons, objective, opt);
}

Mat gain_from(const SynthesisParams& p, const Mat& P11, const Mat& Xi2) {
  return p.B2.partialPivLu().solve(P11.partialPivLu().solve(Xi2));
}

void check_b2(const SynthesisParams& p) {
  if (p.B2.rows() != p.B2.cols())
    throw Error(ErrorKind::Unsupported, "input matrix B2 is not square; the gain formula needs B2 invertible");
  Eigen::JacobiSVD<Mat> svd(p.B2);
  const Vec s = svd.singularValues();
  if (!(s[s.size() - 1] > 0.0) || s[0] / s[s.size() - 1] > 1e10)
    throw Error(ErrorKind::Unsupported, "input matrix B2 is singular or too ill-conditioned");
}

ControllerCertificate extract(const Problem& pr, const SdpResult& r, const SynthesisParams& p, const Mat* fixed_k) {
  ControllerCertificate c;
  c.params = p;
  const Vec& x = r.x;
  const auto& v = pr.v;
  c.P = pr.P.evaluate(x);
  c.P = 0.5 * (c.P + c.P.transpose());
  c.U = v.U.evaluate(x);
  c.Q1 = v.Q1.evaluate(x);
  c.Q2 = v.Q2.evaluate(x);
  c.M1 = v.M1.evaluate(x);
  c.M2 = v.M2.evaluate(x);
  c.M3 = v.M3.evaluate(x);
  c.N = v.N.evaluate(x);
  c.L = v.L.evaluate(x);
  c.Omega = v.Omega.evaluate(x);
  c.Xi1 = v.Xi1.evaluate(x);
  c.Xi2 = v.Xi2.evaluate(x);
  c.rho = pr.hinf ? v.rho.evaluate(x)(0, 0) : 0.0;
  const Mat P11 = c.P11();
  c.r = c.N * P11.inverse();
  c.K = fixed_k ? *fixed_k : gain_from(p, P11, c.Xi2);
  c.solver_steps = r.newton_steps;
  for (size_t i = 0; i < r.names.size(); ++i) c.slack.push_back({"lmi:" + r.names[i], r.slack[i]});
  return c;
}

std::string describe_failure(const SdpResult& r) {
  std::ostringstream os;
  os << to_string(r.status);
  if (!r.binding.empty()) os << ", binding '" << r.binding << "'";
  if (r.status == SdpStatus::Infeasible) os << ", best violation " << r.phase1_value;
  if (!r.message.empty()) os << " (" << r.message << ")";
  return os.str();
}

void attach_exact_slacks(ControllerCertificate& c, VerifyMode mode) {
  const VerifyReport rep = verify_certificate(c, mode);
  for (const auto& ch : rep.checks) c.slack.push_back({"exact:" + ch.name, ch.negative ? -ch.eigenvalue : ch.eigenvalue});
  if (!rep.pass)
    throw Error(ErrorKind::CertificateRejected,
                "relaxed inequalities were feasible but the exact check failed: " + rep.summary());
  const Mat gap = c.P11() * c.params.B2 * c.K - c.Xi2;
  if (gap.cwiseAbs().maxCoeff() > 1e-8 * std::max(1.0, c.Xi2.cwiseAbs().maxCoeff()))
    throw Error(ErrorKind::CertificateRejected, "recovered gain does not reproduce Xi2");
}

VerifyMode mode_for(PhiVariant v) {
  return v == PhiVariant::NoDisturbance ? VerifyMode::NoDisturbance : VerifyMode::Stability;
}

std::vector<std::pair<double, Mat>> candidates(const SynthesisParams& p, const SynthesisOptions& opt) {
  std::vector<std::pair<double, Mat>> out{{p.beta1, p.Lambda}};
  if (!opt.grid_search) return out;
  const Mat I = Mat::Identity(p.n_y(), p.n_y());
  for (double b : opt.beta1_grid)
    for (double l : opt.lambda_grid) out.push_back({b, l * I});
  return out;
}

std::string format_number(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

std::string format_pair(double b, const Mat& L) {
  std::ostringstream os;
  os << "beta1=" << b << " Lambda=" << L(0, 0);
  return os.str();
}

// Algorithm 2 (optionally with the H-infinity corners and rho minimised in step 3).
ControllerCertificate algorithm2(const SynthesisParams& params, const SynthesisOptions& opt, bool hinf) {
  params.validate();
  check_b2(params);
  std::vector<std::string> log;
  std::string last_failure;
  for (const auto& [beta1, Lambda] : candidates(params, opt)) {
    SynthesisParams p = params;
    p.beta1 = beta1;
    p.Lambda = Lambda;
    const std::string tag = format_pair(beta1, Lambda);
    Problem step2 = build_problem(p, nullptr, nullptr, hinf, opt.variant);
    SdpOptions feas = opt.sdp;
    const SdpResult r2 = sdp_solve(step2.vs.size(), step2.cons, Vec(), feas);
    if (!r2.ok()) {
      last_failure = tag + ": step 2 " + describe_failure(r2);
      log.push_back(last_failure);
      continue;
    }
    const Mat N = step2.v.N.evaluate(r2.x);
    const Mat P11 = step2.v.P11.evaluate(r2.x);
    // the ratio from step 2 first, then scalar fallbacks r I
    std::vector<std::pair<std::string, Mat>> ratios{{"N P11^-1", N * P11.inverse()}};
    for (double r : opt.ratio_grid) ratios.push_back({"r=" + format_number(r), r * Mat::Identity(p.m(), p.m())});
    std::optional<Problem> step3;
    SdpResult r3;
    for (const auto& [rtag, r1] : ratios) {
      step3.emplace(build_problem(p, &r1, nullptr, hinf, opt.variant));
      r3 = solve(*step3, opt.sdp);
      if (r3.ok()) {
        log.push_back(tag + ": step 3 with " + rtag + " feasible");
        break;
      }
      last_failure = tag + ": step 3 (" + rtag + ") " + describe_failure(r3);
      log.push_back(last_failure);
    }
    if (!r3.ok()) continue;
    const Problem& s3 = *step3;
    ControllerCertificate c = extract(s3, r3, p, nullptr);
    c.solver_steps += r2.newton_steps;
    c.source = hinf ? "algorithm2-hinf" : "algorithm2";
    log.push_back(tag + ": feasible");
    c.log = log;
    attach_exact_slacks(c, mode_for(opt.variant));
    if (hinf) attach_exact_slacks(c, VerifyMode::Hinf);
    return c;
  }
  std::string msg = "no feasible (beta1, Lambda) pair; last attempt " + last_failure;
  throw Error(ErrorKind::Infeasible, msg);
}

}  // namespace

ControllerCertificate synthesize_gain(const SynthesisParams& params, const SynthesisOptions& opt) {
  return algorithm2(params, opt, false);
}

ControllerCertificate certify_gain(const SynthesisParams& params, const Mat& K, const SynthesisOptions& opt) {
  params.validate();
  if (K.rows() != params.n_u() || K.cols() != params.n_y())
    throw Error(ErrorKind::InvalidArgument, "gain must be n_u x n_y");
  std::vector<std::string> log;
  std::string last_failure;
  for (const auto& [beta1, Lambda] : candidates(params, opt)) {
    SynthesisParams p = params;
    p.beta1 = beta1;
    p.Lambda = Lambda;
    const std::string tag = format_pair(beta1, Lambda);
    Problem pr = build_problem(p, nullptr, &K, false, opt.variant);
    const SdpResult r = sdp_solve(pr.vs.size(), pr.cons, Vec(), opt.sdp);
    if (!r.ok()) {
      last_failure = tag + ": " + describe_failure(r);
      log.push_back(last_failure);
      continue;
    }
    ControllerCertificate c = extract(pr, r, p, &K);
    c.source = "fixed-gain";
    log.push_back(tag + ": feasible");
    c.log = log;
    attach_exact_slacks(c, mode_for(opt.variant));
    return c;
  }
  throw Error(ErrorKind::Infeasible, "no certificate found for the given gain; last attempt " + last_failure);
}

GammaResult optimize_gamma(const SynthesisParams& params, double omega_rho, const SynthesisOptions& opt,
                           int max_iterations) {
  GammaResult out;
  out.cert = algorithm2(params, opt, true);
  out.rho_history.push_back(out.cert.rho);
  const SynthesisParams& p = out.cert.params;
  double prev = out.cert.rho;
  bool done = false;
  int it = 0;
  auto consider = [&](const Problem& pr, const SdpResult& r, const Mat* fixed_k, const char* step) {
    if (!r.ok()) {
      ++out.rejected;
      out.cert.log.push_back(std::string(step) + ": " + describe_failure(r));
      return false;
    }
    ControllerCertificate c = extract(pr, r, p, fixed_k);
    if (c.rho > prev) {
      ++out.rejected;
      out.cert.log.push_back(std::string(step) + ": rho increased, iterate rejected");
      return false;
    }
    try {
      attach_exact_slacks(c, VerifyMode::Hinf);
    } catch (const Error& e) {
      ++out.rejected;
      out.cert.log.push_back(std::string(step) + ": " + e.what());
      return false;
    }
    c.log = out.cert.log;
    c.solver_steps += out.cert.solver_steps;
    c.source = "algorithm3";
    const double change = std::abs(prev - c.rho);
    prev = c.rho;
    out.cert = c;
    out.rho_history.push_back(c.rho);
    return change < omega_rho;
  };
  if (omega_rho <= 0.0) throw Error(ErrorKind::InvalidArgument, "omega_rho must be positive");
  while (!done && it < max_iterations) {
    ++it;
    // step 2: K fixed, N free
    const Mat K = out.cert.K;
    Problem s2 = build_problem(p, nullptr, &K, true, opt.variant);
    const SdpResult r2 = solve(s2, opt.sdp);
    const bool accepted2 = r2.ok();
    if (consider(s2, r2, &K, "step 2")) break;
    if (!accepted2 && out.rho_history.size() == 1) {
      // cannot even reproduce the starting point; stop with it
      break;
    }
    // step 3: N = r P11 with the step-2 ratio, K free
    const Mat r3 = out.cert.r;
    Problem s3 = build_problem(p, &r3, nullptr, true, opt.variant);
    const SdpResult rr = solve(s3, opt.sdp);
    if (consider(s3, rr, nullptr, "step 3")) break;
    if (it == max_iterations) out.stalled = true;
  }
  out.gamma_opt = std::sqrt(out.cert.rho);
  return out;
}

VerifyMode parse_verify_mode(const std::string& s) {
  if (s == "stability") return VerifyMode::Stability;
  if (s == "hinf") return VerifyMode::Hinf;
  if (s == "no-disturbance") return VerifyMode::NoDisturbance;
  throw Error(ErrorKind::InvalidArgument, "unknown verification mode '" + s + "'");
}

const char* to_string(VerifyMode m) {
  switch (m) {
    case VerifyMode::Stability: return "stability";
    case VerifyMode::Hinf: return "hinf";
    case VerifyMode::NoDisturbance: return "no-disturbance";
  }
  return "stability";
}

std::string VerifyReport::summary() const {
  std::ostringstream os;
  os << std::setprecision(4);
  bool first = true;
  for (const auto& c : checks) {
    if (c.pass) continue;
    os << (first ? "" : ", ") << c.name << (c.negative ? " lambda_max=" : " lambda_min=") << c.eigenvalue;
    first = false;
  }
  return first ? "all checks pass" : os.str();
}

namespace {

double eig_extreme(const Mat& M, bool max) {
  if (M.size() == 0) return max ? -INFINITY : INFINITY;
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (M + M.transpose()), Eigen::EigenvaluesOnly);
  return max ? es.eigenvalues().maxCoeff() : es.eigenvalues().minCoeff();
}

}  // namespace

VerifyReport verify_certificate(const ControllerCertificate& cert, VerifyMode mode) {
  return verify_certificate(cert, cert.params, mode);
}

VerifyReport verify_certificate(const ControllerCertificate& cert, const SynthesisParams& params, VerifyMode mode) {
  VerifyReport rep;
  const double mu = params.margin;
  auto positive = [&](const std::string& name, const Mat& M) {
    const double e = eig_extreme(M, false);
    rep.checks.push_back({name, e, false, std::isfinite(e) && e > mu});
  };
  auto negative = [&](const std::string& name, const Mat& M) {
    const double e = eig_extreme(M, true);
    rep.checks.push_back({name, e, true, std::isfinite(e) && e < -mu});
    rep.corner_max.push_back(std::abs(e));
  };
  const int m = params.m();
  if (cert.P.rows() != 2 * m || cert.U.rows() != m || cert.K.rows() != params.n_u() || cert.K.cols() != params.n_y()) {
    rep.checks.push_back({"dimensions", 0.0, false, false});
    return rep;
  }
  positive("P", cert.P);
  if (!rep.checks.back().pass) {  // nothing further is meaningful
    rep.pass = false;
    return rep;
  }
  positive("U", cert.U);
  positive("L", cert.L);
  positive("Omega", cert.Omega);
  const PhiVariables v = cert.variables();
  positive("xi_tilde", assemble_xi_tilde(v.P11, v.P12, v.P22, v.Q1, v.Q2, params.h).constant());
  for (int k = 1; k <= 4; ++k) {
    if (mode == VerifyMode::Hinf) {
      negative("phi" + std::to_string(k + 4), assemble_hinf(k + 4, params, v, false).matrix.constant());
    } else if (mode == VerifyMode::NoDisturbance) {
      negative("phi_hat" + std::to_string(k), assemble_corollary1(k, params, v).matrix.constant());
    } else {
      negative("phi" + std::to_string(k), assemble_bmi_phi(k, params, v).matrix.constant());
    }
  }
  if (mode == VerifyMode::Hinf) rep.checks.push_back({"rho", cert.rho, false, cert.rho > 0.0});
  rep.pass = true;
  for (const auto& c : rep.checks) rep.pass = rep.pass && c.pass;
  return rep;
}

double ultimate_bound(const ControllerCertificate& cert, double D1) {
  const VerifyReport rep = verify_certificate(cert, VerifyMode::Stability);
  if (!rep.pass) throw Error(ErrorKind::CertificateRejected, "ultimate bound needs a verified certificate: " + rep.summary());
  if (D1 < 0.0) throw Error(ErrorKind::InvalidArgument, "D1 must be non-negative");
  const SynthesisParams& p = cert.params;
  const PhiVariables v = cert.variables();
  const Mat xt = assemble_xi_tilde(v.P11, v.P12, v.P22, v.Q1, v.Q2, p.h).constant();
  const double alpha2 = std::max({eig_extreme(cert.P, true), eig_extreme(xt, true), eig_extreme(cert.U, true)});
  const double alpha5 = std::min({eig_extreme(cert.P, false), eig_extreme(xt, false), eig_extreme(cert.U, false)});
  // sector integral: 0 <= int_0^s mu (gmax - gmin) <= 1/2 gmax (gmax - gmin) s^2
  const Vec spread = p.sector.g_max - p.sector.g_min;
  const double gterm = (p.sector.g_max.array() * spread.array()).maxCoeff();
  const double vnorm = Eigen::JacobiSVD<Mat>(p.V).singularValues()[0];
  const double alpha3_upper = cert.Omega.diagonal().maxCoeff() * gterm * vnorm * vnorm;
  const double a1 = 0.5 * rep.corner_max[1];
  const double a4 = 0.5 * rep.corner_max[3];
  const double abar4 = std::min(a1, a4);
  const double abar5 = abar4 / (alpha2 + alpha3_upper);
  const double abar6 = abar5 * alpha5;
  return std::sqrt(2.0 / abar6) * D1;
}

// ---------------------------------------------------------------- serialization

namespace {

using nlohmann::json;

json mat_json(const Mat& m) {
  json j;
  j["rows"] = m.rows();
  j["cols"] = m.cols();
  std::vector<double> d;
  d.reserve(static_cast<size_t>(m.size()));
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) d.push_back(m(r, c));
  j["data"] = d;
  return j;
}

Mat json_mat(const json& j) {
  const auto rows = j.at("rows").get<Eigen::Index>();
  const auto cols = j.at("cols").get<Eigen::Index>();
  const auto d = j.at("data").get<std::vector<double>>();
  if (static_cast<Eigen::Index>(d.size()) != rows * cols) throw Error(ErrorKind::Io, "matrix data has the wrong length");
  Mat m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = d[static_cast<size_t>(r * cols + c)];
  return m;
}

}  // namespace

void write_certificate(const ControllerCertificate& c, const std::string& path) {
  json j;
  const auto& p = c.params;
  json jp;
  for (const auto& [k, m] : std::vector<std::pair<const char*, const Mat*>>{
           {"A", &p.A}, {"B2", &p.B2}, {"B1", &p.B1}, {"C", &p.C}, {"W", &p.W}, {"V", &p.V}, {"Lambda", &p.Lambda}})
    jp[k] = mat_json(*m);
  jp["g_min"] = std::vector<double>(p.sector.g_min.data(), p.sector.g_min.data() + p.sector.g_min.size());
  jp["g_max"] = std::vector<double>(p.sector.g_max.data(), p.sector.g_max.data() + p.sector.g_max.size());
  jp["q"] = std::vector<double>(p.q.data(), p.q.data() + p.q.size());
  jp["r"] = std::vector<double>(p.r.data(), p.r.data() + p.r.size());
  jp["delta"] = p.delta;
  jp["h"] = p.h;
  jp["epsilon"] = p.epsilon;
  jp["alpha"] = p.alpha;
  jp["beta1"] = p.beta1;
  jp["beta2"] = p.beta2;
  jp["D1"] = p.D1;
  jp["margin"] = p.margin;
  j["params"] = jp;
  json jv;
  for (const auto& [k, m] : std::vector<std::pair<const char*, const Mat*>>{
           {"P", &c.P}, {"U", &c.U}, {"Q1", &c.Q1}, {"Q2", &c.Q2}, {"M1", &c.M1}, {"M2", &c.M2}, {"M3", &c.M3},
           {"N", &c.N}, {"L", &c.L}, {"Omega", &c.Omega}, {"Xi1", &c.Xi1}, {"Xi2", &c.Xi2}, {"r", &c.r}, {"K", &c.K}})
    jv[k] = mat_json(*m);
  j["variables"] = jv;
  j["rho"] = c.rho;
  json js = json::array();
  for (const auto& s : c.slack) js.push_back({{"name", s.name}, {"value", s.value}});
  j["slack"] = js;
  j["provenance"] = {{"source", c.source}, {"solver_steps", c.solver_steps}, {"log", c.log}};
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path);
  out << std::setprecision(17) << j.dump(2) << "\n";
}

ControllerCertificate read_certificate(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot read " + path);
  json j;
  try {
    in >> j;
    ControllerCertificate c;
    const json& jp = j.at("params");
    auto& p = c.params;
    p.A = json_mat(jp.at("A"));
    p.B2 = json_mat(jp.at("B2"));
    p.B1 = json_mat(jp.at("B1"));
    p.C = json_mat(jp.at("C"));
    p.W = json_mat(jp.at("W"));
    p.V = json_mat(jp.at("V"));
    p.Lambda = json_mat(jp.at("Lambda"));
    const auto gmin = jp.at("g_min").get<std::vector<double>>();
    const auto gmax = jp.at("g_max").get<std::vector<double>>();
    p.sector.g_min = Eigen::Map<const Vec>(gmin.data(), static_cast<Eigen::Index>(gmin.size()));
    p.sector.g_max = Eigen::Map<const Vec>(gmax.data(), static_cast<Eigen::Index>(gmax.size()));
    if (jp.contains("q") && jp.contains("r")) {
      const auto q = jp.at("q").get<std::vector<double>>();
      const auto r = jp.at("r").get<std::vector<double>>();
      p.q = Eigen::Map<const Vec>(q.data(), static_cast<Eigen::Index>(q.size()));
      p.r = Eigen::Map<const Vec>(r.data(), static_cast<Eigen::Index>(r.size()));
    }
    p.delta = jp.at("delta");
    p.h = jp.at("h");
    p.epsilon = jp.at("epsilon");
    p.alpha = jp.at("alpha");
    p.beta1 = jp.at("beta1");
    p.beta2 = jp.at("beta2");
    p.D1 = jp.at("D1");
    p.margin = jp.at("margin");
    const json& jv = j.at("variables");
    c.P = json_mat(jv.at("P"));
    c.U = json_mat(jv.at("U"));
    c.Q1 = json_mat(jv.at("Q1"));
    c.Q2 = json_mat(jv.at("Q2"));
    c.M1 = json_mat(jv.at("M1"));
    c.M2 = json_mat(jv.at("M2"));
    c.M3 = json_mat(jv.at("M3"));
    c.N = json_mat(jv.at("N"));
    c.L = json_mat(jv.at("L"));
    c.Omega = json_mat(jv.at("Omega"));
    c.Xi1 = json_mat(jv.at("Xi1"));
    c.Xi2 = json_mat(jv.at("Xi2"));
    c.r = json_mat(jv.at("r"));
    c.K = json_mat(jv.at("K"));
    c.rho = j.at("rho");
    for (const auto& s : j.at("slack")) c.slack.push_back({s.at("name"), s.at("value")});
    c.source = j.at("provenance").at("source");
    c.solver_steps = j.at("provenance").at("solver_steps");
    c.log = j.at("provenance").at("log").get<std::vector<std::string>>();
    p.validate();
    return c;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Io, "malformed certificate " + path + ": " + e.what());
  }
}

}  // namespace pdeetc
