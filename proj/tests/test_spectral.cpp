#include <cmath>
#include <cstdlib>
#include <sstream>

#include "doctest.h"
#include "oracles.hpp"
#include "transmute/csv.hpp"
#include "transmute/spectral.hpp"

using namespace transmute;

namespace {

Potential exp_q(double shift = 0.0) {
  return Potential::from_function([shift](double x) { return cplx(std::exp(x) + shift); }, true, "exp(x)");
}

LegendreKernel kernel_for(const Potential& q, double b = M_PI, std::size_t n = 32, std::size_t m = 2000) {
  return build_beta(make_formal_powers(q, Grid::half(b, m), 1), n);
}

double inner(const std::vector<double>& a, const std::vector<double>& b, double len) {
  std::vector<double> p(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) p[i] = a[i] * b[i];
  return integrate<double>(p, Grid(0.0, len, a.size() - 1));
}

std::size_t interior_sign_changes(const std::vector<double>& y) {
  std::size_t n = 0;
  for (std::size_t i = 2; i + 1 < y.size(); ++i)
    if ((y[i] < 0.0) != (y[i - 1] < 0.0)) ++n;
  return n;
}

}  // namespace

TEST_CASE("characteristic function closed forms") {
  const auto k0 = kernel_for(Potential());
  const auto k1 = kernel_for(Potential::constant(1.0));
  SpectralProblem p0{Potential(), M_PI}, p1{Potential::constant(1.0), M_PI};
  for (double w : {0.3, 1.0, 2.5, 7.1, 40.0}) {
    CHECK(std::abs(characteristic(p0, k0, w) - std::sin(w * M_PI) / w) <= 1e-12);
    const cplx big = std::sqrt(cplx(w * w - 1.0));
    const double exact = big == 0.0 ? M_PI : (std::sin(big * M_PI) / big).real();
    CHECK(std::abs(characteristic(p1, k1, w) - exact) <= 1e-12);
    // conjugate symmetry: u(-w) = conj u(w), so the sine part is real
    CHECK(std::abs(solve_u_nsbf(k1, -w, M_PI) - std::conj(solve_u_nsbf(k1, w, M_PI))) <= 1e-12);
  }
  // w = i kappa: sinh(sqrt(kappa^2 + 1) pi) / sqrt(kappa^2 + 1)
  const double s = std::sqrt(0.25 + 1.0);
  CHECK(characteristic_imag(p1, k1, 0.5) == doctest::Approx(std::sinh(s * M_PI) / s).epsilon(1e-12));
}

TEST_CASE("problem validation") {
  const auto k = kernel_for(Potential());
  SpectralProblem p{Potential::constant(cplx(1.0, 1.0)), M_PI};
  CHECK_THROWS_AS(characteristic(p, k, 1.0), DomainError);
  p.q = Potential();
  p.left = {0.0, 0.0};
  CHECK_THROWS_AS(characteristic(p, k, 1.0), DomainError);
  p.left = {1.0, 0.0};
  p.b = 2.0001;
  CHECK_THROWS_AS(characteristic(p, k, 1.0), DomainError);
  p.b = 4.0;
  CHECK_THROWS_AS(characteristic(p, k, 1.0), DomainError);
  p.b = M_PI;
  CHECK_THROWS_AS(characteristic(p, k, 0.0), DomainError);
  p.omega_min = 3.0;
  p.omega_max = 2.0;
  CHECK_THROWS_AS(find_eigenvalues_in_range(p, k), DomainError);
}

TEST_CASE("Dirichlet eigenvalues of constant potentials") {
  const auto k0 = kernel_for(Potential());
  const auto k1 = kernel_for(Potential::constant(1.0));
  const auto r0 = find_eigenvalues(SpectralProblem{Potential(), M_PI}, k0, 100);
  const auto r1 = find_eigenvalues(SpectralProblem{Potential::constant(1.0), M_PI}, k1, 100);
  REQUIRE(r0.pairs.size() == 100);
  REQUIRE(r1.pairs.size() == 100);
  double e0 = 0, e1 = 0, early = 0, late = 0;
  for (std::size_t i = 0; i < 100; ++i) {
    const double n = i + 1.0;
    CHECK(r0.pairs[i].index == i + 1);
    CHECK(r0.pairs[i].omega.imag() == 0.0);
    if (i) CHECK(r0.pairs[i].omega.real() > r0.pairs[i - 1].omega.real());
    e0 = std::max(e0, std::abs(r0.pairs[i].omega.real() - n));
    const double d1 = std::abs(r1.pairs[i].omega.real() - std::sqrt(n * n + 1.0));
    e1 = std::max(e1, d1);
    (i < 10 ? early : late) = std::max(i < 10 ? early : late, d1);
    CHECK(r1.pairs[i].lambda == doctest::Approx(n * n + 1.0).epsilon(1e-12));
    CHECK(r1.pairs[i].residual <= 1e-10);
  }
  CHECK(e0 <= 1e-9);
  CHECK(e1 <= 1e-9);
  // no growth with the index beyond the rounding floor of the series
  CHECK(std::max(late, 1e-13) <= 10.0 * std::max(early, 1e-13));
  CHECK(r0.diagnostics.empty());
}

TEST_CASE("exponential potential against shooting") {
  const auto q = exp_q();
  const auto k = kernel_for(q);
  const auto r = find_eigenvalues(SpectralProblem{q, M_PI}, k, 50);
  REQUIRE(r.pairs.size() == 50);
  for (std::size_t i = 0; i < 10; ++i) {
    const double w = r.pairs[i].omega.real();
    CHECK(std::abs(w - oracle::shooting_eigenvalue(q, M_PI, w - 0.01, w + 0.01)) <= 1e-7);
  }
  const auto err = [&](std::size_t n) {
    const double w = r.pairs[n - 1].omega.real();
    return std::abs(w - oracle::shooting_eigenvalue(q, M_PI, w - 0.01, w + 0.01));
  };
  const double e5 = err(5), e50 = err(50);
  MESSAGE("error at n = 5: " << e5 << ", at n = 50: " << e50);
  CHECK(e50 <= 10.0 * e5);
  for (const auto& e : r.pairs) {
    CHECK(e.residual <= 1e-10);
    CHECK(e.certificate <= 1e-9);
  }
}

TEST_CASE("constant shift moves every eigenvalue by the shift") {
  const auto r = find_eigenvalues(SpectralProblem{exp_q(), M_PI}, kernel_for(exp_q()), 30);
  const auto s = find_eigenvalues(SpectralProblem{exp_q(1.0), M_PI}, kernel_for(exp_q(1.0)), 30);
  for (std::size_t i = 0; i < 30; ++i) CHECK(std::abs(s.pairs[i].lambda - r.pairs[i].lambda - 1.0) <= 1e-9);
  const auto a = find_eigenvalues(SpectralProblem{Potential(), M_PI}, kernel_for(Potential()), 30);
  const auto b = find_eigenvalues(SpectralProblem{Potential::constant(1.0), M_PI}, kernel_for(Potential::constant(1.0)), 30);
  for (std::size_t i = 0; i < 30; ++i) CHECK(std::abs(b.pairs[i].lambda - a.pairs[i].lambda - 1.0) <= 1e-9);
}

TEST_CASE("eigenfunctions") {
  const auto k0 = kernel_for(Potential());
  const SpectralProblem p0{Potential(), M_PI};
  const auto r0 = find_eigenvalues(p0, k0, 3, {.eigenfunctions = true});
  const auto x = eigenfunction_nodes(p0, k0);
  REQUIRE(x.size() == 2001);
  const double norm = std::sqrt(M_PI / 2.0);
  double worst = 0;
  for (std::size_t i = 0; i < x.size(); ++i)
    worst = std::max(worst, std::abs(r0.pairs[0].eigenfunction[i] - std::sin(x[i]) / norm));
  CHECK(worst <= 1e-10);
  CHECK(r0.pairs[0].eigenfunction == eigenfunction(p0, k0, r0.pairs[0]));

  // q = 1, n = 3: sin(W x) with W^2 = w^2 - 1
  const auto k1 = kernel_for(Potential::constant(1.0));
  const SpectralProblem p1{Potential::constant(1.0), M_PI};
  const auto r1 = find_eigenvalues(p1, k1, 3);
  const auto y3 = eigenfunction(p1, k1, r1.pairs[2]);
  const double big = std::sqrt(r1.pairs[2].lambda - 1.0);
  worst = 0;
  for (std::size_t i = 0; i < x.size(); ++i) worst = std::max(worst, std::abs(y3[i] - std::sin(big * x[i]) / norm));
  CHECK(worst <= 1e-8);

  const auto q = exp_q();
  const auto k = kernel_for(q);
  const SpectralProblem p{q, M_PI};
  const auto r = find_eigenvalues(p, k, 20, {.residuals = false, .eigenfunctions = true});
  for (std::size_t n = 1; n <= 20; ++n) {
    const auto& y = r.pairs[n - 1].eigenfunction;
    CAPTURE(n);
    CHECK(interior_sign_changes(y) == n - 1);
    CHECK(std::abs(inner(y, y, M_PI) - 1.0) <= 1e-12);
    CHECK(std::abs(y.front()) <= 1e-14);
    CHECK(std::abs(y.back()) <= 1e-10);
  }
  CHECK(std::abs(inner(r.pairs[0].eigenfunction, r.pairs[1].eigenfunction, M_PI)) <= 1e-8);
  double off = 0;
  for (std::size_t i = 0; i < 20; ++i)
    for (std::size_t j = 0; j < i; ++j)
      off = std::max(off, std::abs(inner(r.pairs[i].eigenfunction, r.pairs[j].eigenfunction, M_PI)));
  CHECK(off <= 1e-8);

  std::stringstream out;
  write_eigenfunction_csv(out, x, r.pairs);
  const auto t = csv::read(out);
  CHECK(t.header.size() == 21);
  CHECK(t.rows.size() == x.size());
  CHECK(csv::to_double(t.rows[700][t.column("y_7")]) == r.pairs[6].eigenfunction[700]);
}

TEST_CASE("Robin conditions") {
  const auto k0 = kernel_for(Potential());
  SUBCASE("Neumann at both ends, lambda = 0 included") {
    SpectralProblem p{Potential(), M_PI, {0.0, 1.0}, {0.0, 1.0}};
    const auto r = find_eigenvalues(p, k0, 8);
    REQUIRE(r.pairs.size() == 8);
    CHECK(r.pairs[0].lambda == 0.0);
    for (std::size_t i = 1; i < 8; ++i) CHECK(std::abs(r.pairs[i].omega.real() - static_cast<double>(i)) <= 1e-8);
  }
  SUBCASE("Dirichlet-Neumann") {
    SpectralProblem p{Potential(), M_PI, {1.0, 0.0}, {0.0, 1.0}};
    const auto r = find_eigenvalues(p, k0, 10);
    for (std::size_t i = 0; i < 10; ++i) {
      CHECK(std::abs(r.pairs[i].omega.real() - (i + 0.5)) <= 1e-8);
      CHECK(std::abs(r.pairs[i].omega.real() - (i + 0.5)) <= r.pairs[i].certificate);
    }
  }
  SUBCASE("general pair against shooting") {
    const auto q = exp_q();
    const auto k = kernel_for(q);
    SpectralProblem p{q, M_PI, {1.0, 1.0}, {2.0, -1.0}};
    const oracle::Ends e{1.0, 1.0, 2.0, -1.0};
    const auto r = find_eigenvalues(p, k, 10);
    for (const auto& pair : r.pairs) {
      const double w = pair.omega.real();
      const double ref = oracle::shooting_eigenvalue(q, M_PI, w - 0.01, w + 0.01, e);
      CAPTURE(w);
      CHECK(std::abs(w - ref) <= 1e-8);
      CHECK(std::abs(w - ref) <= pair.certificate + 1e-12);
    }
  }
}

TEST_CASE("bound states") {
  SUBCASE("negative potential through a shift") {
    // the seed for q = -2 vanishes at pi / (2 sqrt 2); the kernel of q + 2 does not
    const auto q = Potential::constant(-2.0);
    CHECK_THROWS_AS(kernel_for(q), SeedVanishes);
    SpectralProblem p{q, M_PI};
    p.shift = 2.0;
    const auto r = find_eigenvalues(p, kernel_for(Potential()), 4);
    REQUIRE(r.pairs.size() == 4);
    CHECK(std::abs(r.pairs[0].lambda + 1.0) <= 1e-9);
    for (std::size_t n = 2; n <= 4; ++n) CHECK(std::abs(r.pairs[n - 1].lambda - (n * n - 2.0)) <= 1e-9);
    for (const auto& e : r.pairs) CHECK(e.residual <= 1e-10);
  }
  SUBCASE("negative shift") {
    // kernel of q - 3 = 0: w_n = n, lambda_n = n^2 + 3
    SpectralProblem p{Potential::constant(3.0), M_PI};
    p.shift = -3.0;
    const auto r = find_eigenvalues(p, kernel_for(Potential()), 3);
    for (std::size_t n = 1; n <= 3; ++n) {
      CHECK(std::abs(r.pairs[n - 1].omega.real() - static_cast<double>(n)) <= 1e-9);
      CHECK(std::abs(r.pairs[n - 1].lambda - (n * n + 3.0)) <= 1e-9);
      CHECK(r.pairs[n - 1].residual <= 1e-10);
    }
  }
  SUBCASE("from a Robin end") {
    const SpectralProblem p{Potential(), M_PI, {1.0, 1.0}, {1.0, 0.0}};
    const auto r = find_eigenvalues(p, kernel_for(Potential()), 3);
    // kappa coth(kappa pi) = 1
    const double kappa = oracle::shooting_eigenvalue(Potential(), M_PI, 0.5, 1.5, {1.0, 1.0, 1.0, 0.0}, true);
    CHECK(std::abs(kappa / std::tanh(kappa * M_PI) - 1.0) <= 1e-12);
    CHECK(std::abs(r.pairs[0].omega.imag() - kappa) <= 1e-9);
    CHECK(r.pairs[1].lambda > 0.0);
  }
}

TEST_CASE("range search") {
  const auto q = exp_q();
  const auto k = kernel_for(q);
  const auto all = find_eigenvalues(SpectralProblem{q, M_PI}, k, 30, {.residuals = false});
  SpectralProblem p{q, M_PI};
  p.omega_min = 20.0;
  p.omega_max = 30.0;
  const auto r = find_eigenvalues_in_range(p, k, {.residuals = false});
  REQUIRE(!r.pairs.empty());
  for (const auto& e : r.pairs) {
    REQUIRE(e.index >= 1);
    REQUIRE(e.index <= 30);
    CHECK(e.omega.real() == doctest::Approx(all.pairs[e.index - 1].omega.real()).epsilon(kRootTolerance));
  }
  CHECK(r.pairs.front().omega.real() >= 20.0);
  CHECK(r.pairs.back().omega.real() <= 30.0);
}

TEST_CASE("coarse scans are refused") {
  const auto q = Potential::constant(1.0);
  SpectralProblem p{q, M_PI};
  p.scan_density = 1.5;
  CHECK_THROWS_AS(find_eigenvalues(p, kernel_for(q), 5), ScanTooCoarse);
  p.scan_density = 0.0;
  CHECK(p.density() == kDefaultScanDensity);
  p.b = 20.0;
  CHECK(p.density() == doctest::Approx(kScanOversampling * 20.0 / M_PI));
}

TEST_CASE("results do not depend on the thread count") {
  const auto q = exp_q();
  const auto k = kernel_for(q);
  const auto many = find_eigenvalues(SpectralProblem{q, M_PI}, k, 40, {.residuals = false});
  ::setenv("TRANSMUTE_THREADS", "1", 1);
  const auto one = find_eigenvalues(SpectralProblem{q, M_PI}, k, 40, {.residuals = false});
  ::unsetenv("TRANSMUTE_THREADS");
  for (std::size_t i = 0; i < 40; ++i) CHECK(one.pairs[i].omega == many.pairs[i].omega);
}

TEST_CASE("eigen csv") {
  const auto r = find_eigenvalues(SpectralProblem{Potential(), M_PI}, kernel_for(Potential()), 5);
  std::stringstream out;
  write_eigen_csv(out, r.pairs);
  const auto t = csv::read(out);
  REQUIRE(t.rows.size() == 5);
  CHECK(t.header[0] == "n");
  CHECK(csv::to_double(t.rows[3][t.column("omega_re")]) == r.pairs[3].omega.real());
  CHECK(csv::to_double(t.rows[3][t.column("lambda")]) == r.pairs[3].lambda);
}
