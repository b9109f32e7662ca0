#include "pdeetc/examples.hpp"

#include "pdeetc/profiles.hpp"

namespace pdeetc {

namespace {

PlantModel base_plant(Interval domain, double diffusion, double D1) {
  PlantModel p;
  p.spec.domain = domain;
  p.spec.z2 = [diffusion](double) { return diffusion; };
  p.spec.left = {1.0, 0.0};
  p.spec.right = {1.0, 0.0};
  p.b2 = {builtin_profile("example1.b2.1", domain), builtin_profile("example1.b2.2", domain)};
  p.b1 = {builtin_profile("example1.b1", domain)};
  p.cbar = {builtin_profile("example1.cbar", domain)};
  p.D1 = D1;
  return p;
}

Mnn from_rows(const double (&w)[2][15], const double (&vt)[2][15]) {
  Mnn net;
  net.W.resize(2, 15);
  net.V.resize(15, 2);
  for (int i = 0; i < 2; ++i)
    for (int k = 0; k < 15; ++k) {
      net.W(i, k) = w[i][k];
      net.V(k, i) = vt[i][k];
    }
  net.q = Vec::Ones(15);
  net.r = Vec::Ones(15);
  return net;
}

}  // namespace

PlantModel example1_plant(double D1) {
  PlantModel p = base_plant({0.0, 3.141592653589793}, 1.0, D1);
  p.f.coeffs = {0.0, 1.65, 1.5};
  p.xi0 = builtin_profile("example1.xi0", p.spec.domain);
  return p;
}

PlantModel example2_plant(Interval domain, double D1) {
  PlantModel p = base_plant(domain, 0.5, D1);
  p.f.coeffs = {0.0, 0.1, -0.01};
  p.xi0 = builtin_profile("example2.xi0", domain);
  return p;
}

Mnn table1_network() {
  static const double w[2][15] = {
      {0.905, -0.019, -0.126, -0.039, 0.502, 0.094, 0.601, -0.923, 0.715, 0.079, -0.371, -0.354, -0.796, -0.031, 0.406},
      {0.025, -0.361, 0.680, -0.850, 0.327, -0.015, 0.056, -0.041, 0.545, 0.710, 0.011, -0.649, 0.282, -0.996, 0.053}};
  static const double vt[2][15] = {
      {0.998, -0.275, -0.325, 0.409, -0.959, 0.984, 0.417, 0.449, -0.274, 0.920, 0.058, 0.211, 0.271, 0.507, 0.832},
      {-0.058, 0.085, 0.543, -0.974, -0.413, -0.779, 0.146, -0.855, -0.442, -0.055, 0.206, 0.869, -0.568, -0.571,
       0.547}};
  return from_rows(w, vt);
}

Mnn table4_network() {
  static const double w[2][15] = {
      {-0.362, -0.200, 0.755, 0.906, -0.991, 0.2030, 0.571, 0.277, -0.766, 0.421, -0.805, 0.170, 0.695, -0.539,
       -0.608},
      {-0.346, 0.397, -0.369, 0.795, 0.221, -0.589, 0.895, 0.151, -0.717, -0.346, -0.295, 0.143, 0.388, -0.083,
       -0.409}};
  static const double vt[2][15] = {
      {0.314, -0.713, -0.483, 0.583, 0.455, 0.646, 0.873, -0.618, 0.054, -0.439, -0.183, -0.520, -0.285, -0.671,
       -0.995},
      {0.459, -0.335, -0.087, -0.049, -0.046, -0.245, 0.999, 0.299, -0.880, -0.639, -0.235, 0.012, 0.792, -0.431,
       0.158}};
  return from_rows(w, vt);
}

}  // namespace pdeetc
