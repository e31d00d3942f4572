#include <boost/math/special_functions/hermite.hpp>
#include <boost/math/special_functions/laguerre.hpp>
#include <cmath>
#include <sstream>

#include "doctest.h"
#include "oracles.hpp"
#include "transmute/alt_representations.hpp"
#include "transmute/csv.hpp"
#include "transmute/kernel_legendre.hpp"
#include "transmute/ode.hpp"

using namespace transmute;

namespace {

Potential exp_q() {
  return Potential::from_function([](double x) { return cplx(std::exp(x)); }, true, "exp(x)");
}
Potential square_q() {
  return Potential::from_function([](double x) { return cplx(x * x); }, true, "x^2");
}

const FormalPowersTable& unit_powers() {
  static const auto t = make_formal_powers(Potential::constant(1.0), Grid::symmetric(1.0, 2000), 48);
  return t;
}

}  // namespace

TEST_CASE("free potential") {
  const auto t = make_formal_powers(Potential(), Grid::symmetric(1.0, 2000), 48);
  const auto a = build_a(t, 40);
  const auto c = build_c(t, 40);
  double wa = 0, wc = 0;
  for (std::size_t n = 0; n <= 40; ++n)
    for (std::size_t i = 0; i < t.grid.size(); ++i) {
      wa = std::max(wa, std::abs(a.a[n][i]));
      wc = std::max(wc, std::abs(c.c[n][i]));
    }
  // phi_j - x^j is the quadrature error of j nested integrals (1e-9 at
  // j = 48 on this grid) and the Laguerre sums weight it without decay
  CHECK(wa <= 1e-9);
  CHECK(wc <= 1e-12);
  for (double w : {0.0, 1.0, 10.0, 100.0})
    for (std::size_t i = 0; i < t.grid.size(); i += 9) {
      const double x = t.grid[i];
      const cplx e = std::exp(cplx(0.0, w * x));
      if (x >= 0) CHECK(std::abs(solve_u_laguerre(a, w, x) - e) <= 1e-12);
      CHECK(std::abs(solve_u_hermite(c, w, x) - e) <= 1e-12);
    }
  CHECK(std::abs(kernel_eval_laguerre(a, 0.5, -0.2)) <= 1e-12);
}

TEST_CASE("n = 0 collapse and values at the origin") {
  const auto t = make_formal_powers(exp_q(), Grid::symmetric(1.0, 1000), 12);
  const auto a = build_a(t, 10);
  const auto c = build_c(t, 10);
  for (std::size_t i = 0; i < t.grid.size(); ++i) {
    CHECK(std::abs(a.a[0][i] - (t.f[i] - 1.0)) <= 1e-15);
    CHECK(std::abs(c.c[0][i] - (t.f[i] - 1.0) / std::sqrt(M_PI)) <= 1e-15);
  }
  const std::size_t z = t.grid.zero_index();
  for (std::size_t n = 0; n <= 10; ++n) {
    CHECK(a.a[n][z] == cplx(0.0));
    CHECK(c.c[n][z] == cplx(0.0));
  }
}

TEST_CASE("first coefficients for q = 1 at x = 1") {
  const auto a = build_a(unit_powers(), 40);
  const auto c = build_c(unit_powers(), 40);
  // (f - 1)(1 - x) + (phi_1 - x) = sinh 1 - 1 and h_{1,1} = 2
  CHECK(std::abs(a.a_at(1, 1.0) - 0.1752011936) < 1e-10);
  CHECK(std::abs(c.c_at(1, 1.0) - 0.0988466885) < 1e-10);
}

TEST_CASE("coefficients against projections of the exact kernel") {
  const auto a = build_a(unit_powers(), 40);
  const auto c = build_c(unit_powers(), 40);
  for (double x : {0.25, 0.6, 1.0}) {
    double ea = 0, ec = 0;
    for (unsigned n = 0; n <= 40; n += 4) {
      const double pa = oracle::gauss(
          [&](double y) { return oracle::constant_kernel(1.0, x, y) * boost::math::laguerre(n, x - y); }, -x, x, 16);
      ea = std::max(ea, std::abs(a.a_at(n, x) - pa));
      // compare in the orthonormal scaling sqrt(sqrt(pi) 2^n n!) c_n
      const double scale = std::exp(0.5 * (0.5 * std::log(M_PI) + n * std::log(2.0) + std::lgamma(n + 1.0)));
      const double pc = oracle::gauss(
          [&](double y) { return oracle::constant_kernel(1.0, x, y) * boost::math::hermite(n, y); }, -x, x, 16);
      ec = std::max(ec, std::abs(c.c_at(n, x) * scale - pc / (scale)));
    }
    CAPTURE(x);
    CHECK(ea < 1e-12);
    CHECK(ec < 1e-12);
  }
}

TEST_CASE("w = 0 gives the seed solution") {
  for (const auto& q : {Potential::constant(1.0), exp_q(), square_q()}) {
    const auto t = make_formal_powers(q, Grid::symmetric(1.0, 1000), 48);
    const auto a = build_a(t, 40);
    const auto c = build_c(t, 40);
    for (std::size_t i = 0; i < t.grid.size(); i += 7) {
      const double x = t.grid[i];
      if (x >= 0) CHECK(std::abs(solve_u_laguerre(a, 0.0, x) - t.f[i]) <= 1e-14 * std::abs(t.f[i]));
      CHECK(std::abs(solve_u_hermite(c, 0.0, x) - t.f[i]) <= 1e-14 * std::abs(t.f[i]));
    }
  }
}

TEST_CASE("constant potential solutions") {
  const auto a = build_a(unit_powers(), 40);
  const auto c = build_c(unit_powers(), 40);
  const double lag = std::abs(solve_u_laguerre(a, 5.0, 1.0) - oracle::constant_u(1.0, 5.0, 1.0));
  CHECK(lag <= laguerre_bound(a, 5.0, 1.0));
  CHECK(std::abs(solve_u_hermite(c, 2.0, 1.0) - oracle::constant_u(1.0, 2.0, 1.0)) <= 1e-7);
}

TEST_CASE("three representations agree") {
  for (const auto& q : {Potential::constant(1.0), exp_q(), square_q()}) {
    const auto t = make_formal_powers(q, Grid::symmetric(1.0, 2000), 48);
    const auto b = build_beta(t, 40);
    const auto a = build_a(t, 40);
    const auto c = build_c(t, 40);
    for (double x : {0.25, 0.5, 1.0}) {
      for (double w : {0.0, 1.0}) {
        const cplx ub = solve_u_nsbf(b, w, x), ua = solve_u_laguerre(a, w, x), uc = solve_u_hermite(c, w, x);
        CHECK(std::abs(ub - ua) <= 1e-5);
        CHECK(std::abs(ub - uc) <= 1e-5);
      }
      // at w = 5 the Laguerre series is still converging algebraically
      // (|a_n| ~ 1/n, ratio |iw/(1+iw)| = 0.98); it is held to its certificate
      const cplx ub = solve_u_nsbf(b, 5.0, x);
      CHECK(std::abs(ub - solve_u_hermite(c, 5.0, x)) <= 1e-5);
      CHECK(std::abs(ub - solve_u_laguerre(a, 5.0, x)) <= laguerre_bound(a, 5.0, x) + 1e-10);
    }
  }
}

TEST_CASE("Laguerre kernel") {
  const auto& t = unit_powers();
  const auto a = build_a(t, 40);
  const auto k = build_beta(t, 40);
  cplx sum = 0;
  for (std::size_t n = 0; n <= 40; ++n) sum += a.a_at(n, 0.8);
  CHECK(std::abs(kernel_eval_laguerre(a, 0.8, 0.8) - sum) <= 1e-14);
  // pointwise differences are held to the L2 tail of the Laguerre series,
  // which dominates the Legendre one by ten orders of magnitude
  const double tol = laguerre_bound(a, 0.0, 1.0);
  for (double y : {-0.9, -0.5, 0.0, 0.5, 0.9, 1.0})
    CHECK(std::abs(kernel_eval_laguerre(a, 1.0, y) - kernel_eval(k, 1.0, y)) <= tol);
  CHECK_THROWS_AS(kernel_eval_laguerre(a, 0.5, 0.6), DomainError);
  CHECK_THROWS_AS(kernel_eval_laguerre(a, -0.5, 0.0), DomainError);
}

TEST_CASE("Laguerre certificate over real and complex w") {
  const auto q = exp_q();
  const auto t = make_formal_powers(q, Grid::symmetric(1.0, 2000), 48);
  const auto a = build_a(t, 40);
  for (double x : {0.25, 0.5, 1.0})
    for (cplx w : {cplx(1.0), cplx(10.0), cplx(100.0), cplx(1.0, 0.4), cplx(10.0, 0.4), cplx(3.0, -1.0)}) {
      const auto ref = ode_oracle(q, w, x);
      CAPTURE(x);
      CAPTURE(w);
      CHECK(std::abs(solve_u_laguerre(a, w, x) - ref.u) <= laguerre_bound(a, w, x));
    }
  // the bound grows by e^{-Im w x}/sqrt(1 - 2 Im w)
  CHECK(laguerre_bound(a, cplx(2.0, 0.4), 1.0) / laguerre_bound(a, 2.0, 1.0) ==
        doctest::Approx(std::exp(-0.4) / std::sqrt(0.2)));
}

TEST_CASE("Hermite certificate and magnitude warning") {
  const auto q = square_q();
  const auto t = make_formal_powers(q, Grid::symmetric(1.0, 2000), 48);
  const auto c = build_c(t, 40);
  for (double x : {-0.75, 0.25, 1.0})
    for (cplx w : {cplx(1.0), cplx(5.0), cplx(20.0), cplx(2.0, 1.0), cplx(2.0, -1.5)}) {
      const auto ref = ode_oracle(q, w, x);
      CHECK(std::abs(solve_u_hermite(c, w, x) - ref.u) <= hermite_bound(c, w, x));
    }
  CHECK(hermite_bound(c, cplx(1.0, 1.0), 1.0) / hermite_bound(c, 1.0, 1.0) == doctest::Approx(std::exp(0.5)));
  Diagnostics diag;
  solve_u_hermite(c, 12.0, 0.5, &diag);
  CHECK(diag.empty());
  solve_u_hermite(c, 13.0, 0.5, &diag);
  CHECK(diag.has(WarningCode::Magnitude));
}

TEST_CASE("domain errors") {
  const auto a = build_a(unit_powers(), 20);
  CHECK_THROWS_AS(solve_u_laguerre(a, cplx(1.0, 0.5), 0.5), DomainError);
  CHECK_THROWS_AS(solve_u_laguerre(a, cplx(0.0, 1.0), 0.5), DomainError);
  CHECK_THROWS_AS(solve_u_laguerre(a, 1.0, -0.5), DomainError);
  CHECK_NOTHROW(solve_u_laguerre(a, cplx(1.0, 0.49), 0.5));
  CHECK_THROWS_AS(laguerre_bound(a, cplx(0.0, 0.7), 0.5), DomainError);
  CHECK_THROWS_AS(build_a(unit_powers(), 49), DomainError);
  CHECK_THROWS_AS(build_c(unit_powers(), 49), DomainError);
  const auto big = make_formal_powers(Potential::constant(1.0), Grid::symmetric(1.0, 200), 121);
  CHECK_THROWS_AS(build_a(big, 121), DomainError);
  CHECK_THROWS_AS(build_c(big, 101), DomainError);
  CHECK_NOTHROW(build_a(big, 120));
}

TEST_CASE("cancellation is reported") {
  const auto small = build_c(unit_powers(), 40);
  CHECK_FALSE(small.diagnostics.has(WarningCode::Cancellation));
  const auto t = make_formal_powers(exp_q(), Grid::half(3.0, 1500), 100);
  const auto c = build_c(t, 100);
  CHECK(c.diagnostics.has(WarningCode::Cancellation));
}

TEST_CASE("tail without margin") {
  const auto t = make_formal_powers(Potential::constant(1.0), Grid::symmetric(1.0, 200), 10);
  const auto a = build_a(t, 10);
  CHECK(a.margin == 0);
  CHECK(std::isinf(laguerre_bound(a, 1.0, 0.5)));
}

TEST_CASE("csv dumps carry the representation tag") {
  const auto t = make_formal_powers(exp_q(), Grid::symmetric(1.0, 20), 4);
  std::stringstream sa, sc;
  write_laguerre_csv(sa, build_a(t, 3));
  write_hermite_csv(sc, build_c(t, 3));
  const auto ta = csv::read(sa), tc = csv::read(sc);
  REQUIRE(ta.rows.size() == t.grid.size() * 4);
  CHECK(ta.rows[0][0] == "laguerre");
  CHECK(tc.rows[0][0] == "hermite");
  CHECK(csv::to_double(tc.rows[6][3]) == build_c(t, 3).c[2][1].real());
}
