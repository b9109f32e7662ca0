#include "pdeetc/examples.hpp"
#include "pdeetc/lmi.hpp"
#include "pdeetc/sdp.hpp"
#include "pdeetc/synthesis.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <filesystem>

using namespace pdeetc;
using Catch::Approx;

namespace {

const double pi = 3.141592653589793;

Mat sym(const Mat& x) { return x + x.transpose(); }

Vec sorted_eigs(const Mat& m) {
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (m + m.transpose()), Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

SynthesisParams example1_params() {
  const PlantModel plant = example1_plant();
  auto basis = std::make_shared<const ModalBasis>(analytic_dirichlet_basis(1.0, plant.spec.domain, 2));
  const SlowSystem sys = assemble_slow_system(basis, plant.b2, plant.b1, plant.cbar);
  const Mnn net = table1_network();
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
  p.delta = 0.0509;
  p.Lambda = Mat::Constant(1, 1, 1.0);
  p.beta1 = 1.0;
  return p;
}

// Relaxed corner written out block by block, independently of the library
// assembly (g_min = 0, so the zeta1 column is absent).
Mat oracle_corner(int which, const SynthesisParams& p, const Mat& P, const Mat& U, const Mat& Q1, const Mat& Q2,
                  const Mat& M1, const Mat& M2, const Mat& M3, const Mat& N, const Mat& L, const Mat& Om,
                  const Mat& X1, const Mat& X2) {
  const int m = p.m(), ny = p.n_y(), nh = p.n_h(), nd = p.n_d();
  const bool chi1 = which == 1 || which == 2;
  const bool tauh = which == 2 || which == 4;
  const double h = p.h;
  const Mat P11 = P.topLeftCorner(m, m), P21 = P.bottomLeftCorner(m, m);
  const Mat A = p.A, C = p.C, W = p.W;
  const Mat z3 = (p.sector.G_min() + p.sector.G_max()) * p.V, z4 = p.sector.G() * p.V, z2 = p.sector.G_max() * p.V;
  std::vector<int> sz{m, m, m, ny, nh, m};
  if (tauh) sz.push_back(m);
  sz.insert(sz.end(), {m, nh, ny, nd, nd});
  std::vector<int> off(sz.size() + 1, 0);
  for (size_t i = 0; i < sz.size(); ++i) off[i + 1] = off[i] + sz[i];
  Mat F = Mat::Zero(off.back(), off.back());
  auto put = [&](int i, int j, const Mat& b) {
    F.block(off[i], off[j], sz[i], sz[j]) = b;
    if (i != j) F.block(off[j], off[i], sz[j], sz[i]) = b.transpose();
  };
  const Mat I = Mat::Identity(m, m);
  put(0, 0, sym(P11 * A - X2 * C) - sym(Q1) / 2 + sym(M1));
  put(0, 1, (tauh ? Mat::Zero(m, m) : Mat(h * sym(Q1) / 2)) + (N * A).transpose() - (X1 * C).transpose() + M2.transpose());
  put(0, 2, Q1 - Q2 - M1 + M3.transpose());
  if (!chi1) put(0, 3, -X2);
  put(0, 4, P11 * W + 0.5 * z3.transpose() * L);
  put(0, 5, P11);
  put(1, 1, (tauh ? Mat::Zero(m, m) : Mat(h * U)) - sym(N));
  put(1, 2, (tauh ? Mat::Zero(m, m) : Mat(h * (Q2 - Q1))) - M2 + P21.transpose());
  if (!chi1) put(1, 3, -X1);
  put(1, 4, z4.transpose() * Om + N * W);
  put(1, 5, N);
  put(2, 2, sym(Q2) - sym(Q1) / 2 - sym(M3));
  put(3, 3, -p.Lambda);
  put(4, 4, -L);
  put(5, 5, -p.beta1 * I);
  int k = 6;
  if (tauh) {
    put(0, 6, chi1 ? Mat(h * (X2 + X1) * C - h * M1) : Mat(-h * M1));
    put(1, 6, -h * M2);
    put(2, 6, -h * M3);
    put(6, 6, -h * std::exp(-2 * p.alpha * h) * U);
    k = 7;
  }
  put(0, k, p.delta * I);
  put(k, k, -(1.0 / p.beta1) * I);
  put(0, k + 1, z2.transpose() * L);
  put(k + 1, k + 1, -p.beta2 * L);
  put(0, k + 2, C.transpose());
  put(k + 2, k + 2, -(p.epsilon * p.Lambda).inverse());
  put(0, k + 3, P11 * p.B1);
  put(k + 3, k + 3, -Mat::Identity(nd, nd));
  put(1, k + 4, N * p.B1);
  put(k + 4, k + 4, -Mat::Identity(nd, nd));
  return F;
}

}  // namespace

TEST_CASE("SDP: trace maximisation has the analytic optimum", "[sdp]") {
  VariableSet vs;
  const AffineMat X = vs.symmetric("X", 3);
  const std::vector<LmiConstraint> c{{"ub", X - AffineMat::identity(3) * 2.0, Sense::NegativeDefinite}};
  Vec obj(vs.size());
  for (int i = 0; i < vs.size(); ++i) {
    Vec e = Vec::Zero(vs.size());
    e[i] = 1.0;
    obj[i] = -X.evaluate(e).trace();
  }
  const SdpResult r = sdp_solve(vs.size(), c, obj);
  REQUIRE(r.status == SdpStatus::Optimal);
  CHECK(r.objective == Approx(-6.0).margin(1e-4));
  CHECK((vs.value("X", r.x) - 2.0 * Mat::Identity(3, 3)).norm() < 1e-3);
}

TEST_CASE("SDP: contradictory constraints are infeasible", "[sdp]") {
  VariableSet vs;
  const AffineMat Y = vs.symmetric("Y", 2);
  const SdpResult r = sdp_solve(
      vs.size(), {{"a", Y - AffineMat::identity(2), Sense::PositiveDefinite}, {"b", Y, Sense::NegativeDefinite}});
  CHECK(r.status == SdpStatus::Infeasible);
  CHECK(r.phase1_value > 0.0);
}

TEST_CASE("SDP: constant constraint without variables", "[sdp]") {
  const SdpResult r = sdp_solve(0, {{"c", -AffineMat::identity(3), Sense::NegativeDefinite}});
  CHECK(r.ok());
  REQUIRE(r.slack.size() == 1);
  CHECK(r.slack[0] == Approx(1.0));
}

TEST_CASE("SDP verdicts are re-verified by direct eigenvalues", "[sdp][property]") {
  VariableSet vs;
  const AffineMat X = vs.symmetric("X", 2);
  Mat A(2, 2);
  A << -1.0, 2.0, 0.0, -3.0;
  const std::vector<LmiConstraint> c{{"lyap", A.transpose() * X + X * A, Sense::NegativeDefinite},
                                     {"pos", X - AffineMat::identity(2), Sense::PositiveDefinite}};
  const SdpResult r = sdp_solve(vs.size(), c);
  REQUIRE(r.ok());
  const Mat Xv = vs.value("X", r.x);
  CHECK(sorted_eigs(A.transpose() * Xv + Xv * A).maxCoeff() < -1e-6);
  CHECK(sorted_eigs(Xv).minCoeff() > 1.0);
}

TEST_CASE("relaxed corners match an independent block-by-block assembly", "[lmi]") {
  const SynthesisParams p = example1_params();
  const int m = 2, nh = 15;
  std::srand(11);
  auto rnd = [](int r, int c) { return Mat(Mat::Random(r, c)); };
  auto spd = [&](int n) {
    const Mat a = rnd(n, n);
    return Mat(a * a.transpose() + Mat::Identity(n, n));
  };
  const Mat P = spd(2 * m), U = spd(m), Q1 = rnd(m, m), Q2 = rnd(m, m), M1 = rnd(m, m), M2 = rnd(m, m), M3 = rnd(m, m),
            N = rnd(m, m);
  const Mat L = Vec(Vec::Random(nh).array().abs() + 0.5).asDiagonal();
  const Mat Om = Vec(Vec::Random(nh).array().abs() + 0.5).asDiagonal();
  const Mat K = rnd(2, 1);
  const PhiVariables v = constant_variables(P, U, Q1, Q2, M1, M2, M3, N, L, Om, p.B2, K);
  const Mat X2 = P.topLeftCorner(m, m) * p.B2 * K, X1 = N * p.B2 * K;
  for (int which = 1; which <= 4; ++which) {
    const Mat lib = assemble_lmi_phi_tilde(which, p, v).matrix.constant();
    const Mat ref = oracle_corner(which, p, P, U, Q1, Q2, M1, M2, M3, N, L, Om, X1, X2);
    REQUIRE(lib.rows() == ref.rows());
    CHECK((sorted_eigs(lib) - sorted_eigs(ref)).norm() <= 1e-9 * std::max(1.0, ref.norm()));
    CHECK(std::abs(lib.norm() - ref.norm()) <= 1e-9 * ref.norm());
  }
}

TEST_CASE("Xi tilde is the printed 2m x 2m condition", "[lmi]") {
  const Mat P11 = Mat::Identity(2, 2), P12 = Mat::Zero(2, 2), P22 = 2 * Mat::Identity(2, 2);
  Mat Q1(2, 2), Q2(2, 2);
  Q1 << 1, 2, 3, 4;
  Q2 << 0, 1, 0, 0;
  const Mat X = assemble_xi_tilde(AffineMat(P11), AffineMat(P12), AffineMat(P22), AffineMat(Q1), AffineMat(Q2), 0.5)
                    .constant();
  CHECK((X.topLeftCorner(2, 2) - (P11 + 0.5 * sym(Q1) / 2)).norm() < 1e-14);
  CHECK((X.topRightCorner(2, 2) - (P12 + 0.5 * (Q2 - Q1))).norm() < 1e-14);
  CHECK((X.bottomRightCorner(2, 2) - (P22 + 0.5 * (sym(Q1) / 2 - sym(Q2)))).norm() < 1e-14);
}

TEST_CASE("Example 1 synthesis: certificate, Schur consistency, tampering", "[synthesis]") {
  const SynthesisParams p = example1_params();
  SynthesisOptions o;
  o.grid_search = false;
  const ControllerCertificate cert = synthesize_gain(p, o);
  const VerifyReport vr = verify_certificate(cert, VerifyMode::Stability);
  CHECK(vr.pass);
  // every exact (bilinear) corner is at least as negative as its relaxation allows
  for (const auto& s : cert.slack) CHECK(s.value > 0.0);
  for (int which = 1; which <= 4; ++which) {
    const Mat exact = assemble_bmi_phi(which, cert.params, cert.variables()).matrix.constant();
    CHECK(sorted_eigs(exact).maxCoeff() < -p.margin);
  }
  CHECK((cert.K - p.B2.inverse() * cert.P11().inverse() * cert.Xi2).norm() < 1e-8 * std::max(1.0, cert.K.norm()));

  const auto path = (std::filesystem::temp_directory_path() / "pdeetc_cert_test.json").string();
  write_certificate(cert, path);
  ControllerCertificate back = read_certificate(path);
  CHECK((back.K - cert.K).norm() == 0.0);
  CHECK(verify_certificate(back, VerifyMode::Stability).pass);
  back.K = -back.K;
  CHECK_FALSE(verify_certificate(back, VerifyMode::Stability).pass);
  std::filesystem::remove(path);

  CHECK(ultimate_bound(cert, 0.1) > 0.0);
}

TEST_CASE("a waiting time of 10 makes the LMIs infeasible", "[synthesis]") {
  SynthesisParams p = example1_params();
  p.h = 10.0;
  SynthesisOptions o;
  o.grid_search = false;
  CHECK_THROWS_MATCHES(synthesize_gain(p, o), Error,
                       Catch::Matchers::Predicate<Error>([](const Error& e) { return e.kind() == ErrorKind::Infeasible; }));
}
