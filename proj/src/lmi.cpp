#include "pdeetc/lmi.hpp"

#include "pdeetc/error.hpp"

#include <cmath>

namespace pdeetc {

void SynthesisParams::validate() const {
  const auto bad = [](const std::string& what) { throw Error(ErrorKind::InvalidArgument, what); };
  const int mm = m();
  if (mm < 1 || A.cols() != mm) bad("A must be square and non-empty");
  if (B2.rows() != mm || B1.rows() != mm || C.cols() != mm) bad("slow model dimensions are inconsistent");
  if (W.rows() != mm || V.rows() != W.cols() || V.cols() != mm) bad("network dimensions do not match the slow model");
  if (sector.g_min.size() != n_h() || sector.g_max.size() != n_h()) bad("sector bounds do not match the hidden layer");
  if (!(h > 0.0)) bad("waiting time h must be positive");
  if (!(epsilon >= 0.0)) bad("epsilon must be non-negative");
  if (!(delta >= 0.0)) bad("delta must be non-negative");
  if (!(beta1 > 0.0) || !(beta2 > 0.0)) bad("beta1 and beta2 must be positive");
  if (Lambda.rows() != n_y() || Lambda.cols() != n_y()) bad("Lambda must be n_y x n_y");
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (Lambda + Lambda.transpose()));
  if (!(es.eigenvalues().minCoeff() > 0.0)) bad("Lambda must be positive definite");
}

AffineMat assemble_xi_tilde(const AffineMat& P11, const AffineMat& P12, const AffineMat& P22, const AffineMat& Q1,
                            const AffineMat& Q2, double h) {
  const Eigen::Index m = P11.rows();
  for (const AffineMat* a : {&P11, &P12, &P22, &Q1, &Q2})
    if (a->rows() != m || a->cols() != m) throw Error(ErrorKind::InvalidArgument, "xi-tilde blocks must be m x m");
  BlockBuilder b({m, m});
  b.set(0, 0, 0.5 * h * sym(Q1) + P11);
  b.set(0, 1, h * (Q2 - Q1) + P12);
  b.set(1, 1, h * (0.5 * sym(Q1) - sym(Q2)) + P22);
  return b.build(true);
}

namespace {

AffineMat cst(const Mat& m) { return AffineMat(m); }

Mat eye(Eigen::Index n) { return Mat::Identity(n, n); }

struct Corner {
  bool active;   // chi = 1
  bool at_h;     // tau -> h
};

Corner corner_of(int which, bool hinf) {
  const int base = hinf ? 5 : 1;
  if (which < base || which > base + 3)
    throw Error(ErrorKind::InvalidArgument, "corner index " + std::to_string(which) + " out of range");
  const int k = which - base;
  return {k < 2, k % 2 == 1};
}

void check_variables(const SynthesisParams& p, const PhiVariables& v, bool hinf) {
  const Eigen::Index m = p.m(), nh = p.n_h(), ny = p.n_y();
  auto need = [](const AffineMat& a, Eigen::Index r, Eigen::Index c, const char* name) {
    if (a.rows() != r || a.cols() != c)
      throw Error(ErrorKind::InvalidArgument, std::string("variable ") + name + " has the wrong shape");
  };
  need(v.P11, m, m, "P11");
  need(v.P12, m, m, "P12");
  need(v.P22, m, m, "P22");
  need(v.U, m, m, "U");
  need(v.Q1, m, m, "Q1");
  need(v.Q2, m, m, "Q2");
  need(v.M1, m, m, "M1");
  need(v.M2, m, m, "M2");
  need(v.M3, m, m, "M3");
  need(v.N, m, m, "N");
  need(v.L, nh, nh, "L");
  need(v.Omega, nh, nh, "Omega");
  need(v.Xi1, m, ny, "Xi1");
  need(v.Xi2, m, ny, "Xi2");
  if (hinf) need(v.rho, 1, 1, "rho");
}

enum class Form { Exact, Relaxed };

AssembledPhi assemble(Corner c, const SynthesisParams& p, const PhiVariables& v, PhiVariant variant, Form form,
                      int which) {
  p.validate();
  const bool hinf = variant == PhiVariant::Hinf;
  check_variables(p, v, hinf);
  const Eigen::Index m = p.m(), nh = p.n_h(), ny = p.n_y(), nd = p.n_d();
  const double h = p.h;

  // ---------------------------------------------------------------- layout
  std::vector<std::pair<PhiBlock, Eigen::Index>> layout = {
      {PhiBlock::Xi, m},           {PhiBlock::XiDot, m},  {PhiBlock::XiDelayed, m},
      {PhiBlock::TriggerError, ny}, {PhiBlock::Hidden, nh}, {PhiBlock::Residual, m}};
  const int iXi = 0, iDot = 1, iDel = 2, iE = 3, iMu = 4, iRes = 5;
  int iNu = -1, iD = -1;
  if (c.at_h) {
    iNu = static_cast<int>(layout.size());
    layout.push_back({PhiBlock::DelayIntegral, m});
  }
  if (hinf) {
    iD = static_cast<int>(layout.size());
    layout.push_back({PhiBlock::Disturbance, nd});
  }

  const Mat Lam = 0.5 * (p.Lambda + p.Lambda.transpose());
  const Mat trig = hinf ? Mat(p.epsilon * Lam + eye(ny)) : Mat(p.epsilon * Lam);
  const AffineMat P11B1 = v.P11 * p.B1;
  const AffineMat NB1 = v.N * p.B1;
  const Mat z1 = p.zeta1(), z2 = p.zeta2(), z3 = p.zeta3(), z4 = p.zeta4();

  // Schur columns of the relaxed form; each is (row block, column, diagonal)
  struct SchurCol {
    int row;
    AffineMat col;
    AffineMat diag;
  };
  std::vector<SchurCol> schur;
  // disturbance squares: which of them this corner carries
  bool sq_p11 = !hinf, sq_n = !hinf;
  if (variant == PhiVariant::NoDisturbance) {
    // the printed corollary removes the P11 square at tau -> 0 and the N square at tau -> h
    if (c.at_h)
      sq_n = false;
    else
      sq_p11 = false;
  }
  if (form == Form::Relaxed) {
    if (p.delta > 0.0) schur.push_back({iXi, cst(p.delta * eye(m)), cst(-(1.0 / p.beta1) * eye(m))});
    if (!z1.isZero(0.0)) schur.push_back({iXi, AffineMat(z1.transpose()) * v.L, -(1.0 / p.beta2) * v.L});
    if (!z2.isZero(0.0)) schur.push_back({iXi, AffineMat(z2.transpose()) * v.L, -p.beta2 * v.L});
    if (!trig.isZero(0.0)) schur.push_back({iXi, cst(p.C.transpose()), cst(-Mat(trig.inverse()))});
    if (sq_p11 && nd > 0) schur.push_back({iXi, P11B1, cst(-eye(nd))});
    if (sq_n && nd > 0) schur.push_back({iDot, NB1, cst(-eye(nd))});
  }
  for (const auto& s : schur) layout.push_back({PhiBlock::Schur, s.diag.rows()});

  std::vector<Eigen::Index> sizes;
  for (const auto& [kind, n] : layout) sizes.push_back(n);
  BlockBuilder b(sizes);

  // ---------------------------------------------------------------- blocks
  AffineMat e11 = sym(v.P11 * p.A) - sym(v.Xi2 * p.C) - 0.5 * sym(v.Q1) + sym(v.M1);
  if (form == Form::Exact) {
    e11 += cst(p.beta1 * p.delta * p.delta * eye(m));
    e11 -= 0.5 * sym(AffineMat(z1.transpose()) * v.L * z2);
    e11 += cst(p.C.transpose() * trig * p.C);
    if (sq_p11) e11 += P11B1 * P11B1.transpose();
  }
  b.set(iXi, iXi, e11);

  AffineMat e12 = (v.N * p.A).transpose() - (v.Xi1 * p.C).transpose() + v.M2.transpose();
  if (!c.at_h) e12 += 0.5 * h * sym(v.Q1);
  b.set(iXi, iDot, e12);
  b.set(iXi, iDel, v.Q1 - v.Q2 - v.M1 + v.M3.transpose());
  if (!c.active) {
    b.set(iXi, iE, -v.Xi2);
    b.set(iDot, iE, -v.Xi1);
  }
  b.set(iXi, iMu, v.P11 * p.W + 0.5 * AffineMat(z3.transpose()) * v.L);
  b.set(iXi, iRes, v.P11);

  AffineMat e22 = -sym(v.N);
  if (!c.at_h) e22 += h * v.U;
  if (form == Form::Exact && sq_n) e22 += NB1 * NB1.transpose();
  b.set(iDot, iDot, e22);
  AffineMat e23 = v.P12 - v.M2;
  if (!c.at_h) e23 += h * (v.Q2 - v.Q1);
  b.set(iDot, iDel, e23);
  b.set(iDot, iMu, AffineMat(z4.transpose()) * v.Omega + v.N * p.W);
  b.set(iDot, iRes, v.N);

  b.set(iDel, iDel, sym(v.Q2) - 0.5 * sym(v.Q1) - sym(v.M3));
  b.set(iE, iE, cst(-Lam));
  b.set(iMu, iMu, -v.L);
  b.set(iRes, iRes, cst(-p.beta1 * eye(m)));

  if (c.at_h) {
    AffineMat e17 = -h * v.M1;
    if (c.active) e17 += h * ((v.Xi2 + v.Xi1) * p.C);
    b.set(iXi, iNu, e17);
    b.set(iDot, iNu, -h * v.M2);
    b.set(iDel, iNu, -h * v.M3);
    b.set(iNu, iNu, -(h * std::exp(-2.0 * p.alpha * h)) * v.U);
  }
  if (hinf) {
    b.set(iXi, iD, P11B1);
    b.set(iDot, iD, NB1);
    AffineMat dd(nd, nd);
    for (const auto& [idx, coef] : v.rho.terms()) dd.add_term(idx, -coef(0, 0) * eye(nd));
    dd -= cst(v.rho.constant()(0, 0) * eye(nd));
    b.set(iD, iD, dd);
  }
  const int first_schur = static_cast<int>(layout.size() - schur.size());
  for (size_t k = 0; k < schur.size(); ++k) {
    const int col = first_schur + static_cast<int>(k);
    b.set(schur[k].row, col, schur[k].col);
    b.set(col, col, schur[k].diag);
  }
  (void)which;
  return {b.build(true), layout};
}

}  // namespace

AssembledPhi assemble_bmi_phi(int which, const SynthesisParams& p, const PhiVariables& v, PhiVariant variant) {
  if (variant == PhiVariant::Hinf) return assemble_hinf(which, p, v, false);
  return assemble(corner_of(which, false), p, v, variant, Form::Exact, which);
}

AssembledPhi assemble_lmi_phi_tilde(int which, const SynthesisParams& p, const PhiVariables& v, PhiVariant variant) {
  if (variant == PhiVariant::Hinf) return assemble_hinf(which, p, v, true);
  return assemble(corner_of(which, false), p, v, variant, Form::Relaxed, which);
}

AssembledPhi assemble_corollary1(int which, const SynthesisParams& p, const PhiVariables& v) {
  return assemble(corner_of(which, false), p, v, PhiVariant::NoDisturbance, Form::Exact, which);
}

AssembledPhi assemble_hinf(int which, const SynthesisParams& p, const PhiVariables& v, bool lmi) {
  return assemble(corner_of(which, true), p, v, PhiVariant::Hinf, lmi ? Form::Relaxed : Form::Exact, which);
}

PhiVariables constant_variables(const Mat& P, const Mat& U, const Mat& Q1, const Mat& Q2, const Mat& M1,
                                const Mat& M2, const Mat& M3, const Mat& N, const Mat& L, const Mat& Omega,
                                const Mat& B2, const Mat& K, double rho) {
  const Eigen::Index m = U.rows();
  if (P.rows() != 2 * m || P.cols() != 2 * m) throw Error(ErrorKind::InvalidArgument, "P must be 2m x 2m");
  PhiVariables v;
  v.P11 = cst(P.topLeftCorner(m, m));
  v.P12 = cst(P.topRightCorner(m, m));
  v.P22 = cst(P.bottomRightCorner(m, m));
  v.U = cst(U);
  v.Q1 = cst(Q1);
  v.Q2 = cst(Q2);
  v.M1 = cst(M1);
  v.M2 = cst(M2);
  v.M3 = cst(M3);
  v.N = cst(N);
  v.L = cst(L);
  v.Omega = cst(Omega);
  v.Xi2 = cst(P.topLeftCorner(m, m) * B2 * K);
  v.Xi1 = cst(N * B2 * K);
  v.rho = cst(Mat::Constant(1, 1, rho));
  return v;
}

}  // namespace pdeetc
