#include "pdeetc/examples.hpp"
#include "pdeetc/galerkin.hpp"
#include "pdeetc/profiles.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <catch2/catch_amalgamated.hpp>

#include <cmath>

using namespace pdeetc;
using Catch::Approx;

namespace {

const double pi = 3.141592653589793;

// independent adaptive quadrature
double gk(const std::function<double(double)>& f, double a, double b, unsigned depth = 15) {
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, depth, 1e-14);
}

SturmLiouvilleSpec laplacian(double k, Interval dom) {
  SturmLiouvilleSpec s;
  s.domain = dom;
  s.z2 = [k](double) { return k; };
  return s;
}

}  // namespace

TEST_CASE("analytic Dirichlet eigenvalues on [0, pi]", "[galerkin]") {
  const ModalBasis b = analytic_dirichlet_basis(1.0, {0.0, pi}, 2);
  REQUIRE(b.eigenvalues[0] == -1.0);
  REQUIRE(b.eigenvalues[1] == -4.0);
  REQUIRE(b.eigenvalues[2] == -9.0);
}

TEST_CASE("finite-difference eigensolve matches the analytic spectrum", "[galerkin]") {
  const ModalBasis b = eigensolve_sturm_liouville(laplacian(1.0, {0.0, pi}), 2000, 2);
  CHECK(b.eigenvalues[0] == Approx(-1.0).margin(1e-4));
  CHECK(b.eigenvalues[1] == Approx(-4.0).margin(1e-4));
  CHECK(b.separable);
}

TEST_CASE("eigenfunctions are orthonormal", "[galerkin][property]") {
  for (const bool fd : {false, true}) {
    const ModalBasis b = fd ? eigensolve_sturm_liouville(laplacian(0.5, {0.0, 2.0}), 1500, 3)
                            : analytic_dirichlet_basis(0.5, {0.0, 2.0}, 3);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        // FD modes are piecewise linear; a shallow rule is enough for the 2e-3 check
        const double ip = gk([&](double p) { return b.phi(i, p) * b.phi(j, p); }, 0.0, 2.0, fd ? 5 : 15);
        CHECK(ip == Approx(i == j ? 1.0 : 0.0).margin(fd ? 2e-3 : 1e-10));
      }
  }
}

TEST_CASE("Example 1 projections against adaptive quadrature", "[galerkin]") {
  const PlantModel plant = example1_plant();
  auto basis = std::make_shared<const ModalBasis>(analytic_dirichlet_basis(1.0, plant.spec.domain, 2));
  const SlowSystem sys = assemble_slow_system(basis, plant.b2, plant.b1, plant.cbar);
  // C_s = [1, 1] and first B1 entry 2 sqrt(2/pi) as printed
  CHECK(sys.C(0, 0) == Approx(1.0).margin(1e-8));
  CHECK(sys.C(0, 1) == Approx(1.0).margin(1e-8));
  CHECK(sys.B1(0, 0) == Approx(2.0 * std::sqrt(2.0 / pi)).margin(1e-8));
  // every entry against the oracle
  auto phi = [](int j, double p) { return std::sqrt(2.0 / pi) * std::sin((j + 1) * p); };
  for (int j = 0; j < 2; ++j) {
    for (int c = 0; c < 2; ++c)
      CHECK(sys.B2(j, c) == Approx(gk([&](double p) { return phi(j, p) * plant.b2[c](p); }, 0, pi)).margin(1e-10));
    CHECK(sys.B1(j, 0) == Approx(gk([&](double p) { return phi(j, p) * plant.b1[0](p); }, 0, pi)).margin(1e-10));
    CHECK(sys.C(0, j) == Approx(gk([&](double p) { return phi(j, p) * plant.cbar[0](p); }, 0, pi)).margin(1e-10));
  }
}

TEST_CASE("projection of an eigenfunction is a unit vector", "[galerkin][property]") {
  const ModalBasis b = analytic_dirichlet_basis(1.0, {0.0, pi}, 3);
  const Vec e = project(builtin_profile("mode(2)", {0.0, pi}), b, {0, 1, 2});
  CHECK(e[0] == Approx(0.0).margin(1e-12));
  CHECK(e[1] == Approx(1.0).margin(1e-12));
  CHECK(e[2] == Approx(0.0).margin(1e-12));
}

TEST_CASE("slow state reconstruction inverts the modal sum", "[galerkin]") {
  const ModalBasis b = analytic_dirichlet_basis(1.0, {0.0, pi}, 2);
  Vec xi(2);
  xi << -0.4, 0.1;
  Vec loc = Vec::LinSpaced(16, 0.1, 3.0);
  Vec samples(loc.size());
  for (Eigen::Index i = 0; i < loc.size(); ++i) samples[i] = b.field(xi, loc[i]);
  CHECK((reconstruct_slow_state(samples, b, loc) - xi).norm() < 1e-12);
}

TEST_CASE("Robin ends are rejected by the analytic basis", "[galerkin]") {
  SturmLiouvilleSpec s = laplacian(1.0, {0.0, 1.0});
  s.left = {1.0, 1.0};
  CHECK_THROWS_AS(analytic_dirichlet_basis(s, 2), Error);
}
