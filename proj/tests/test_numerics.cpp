#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "transmute/csv.hpp"
#include "transmute/errors.hpp"
#include "transmute/numerics.hpp"
#include "transmute/ode.hpp"

using namespace transmute;
using std::numbers::pi;

namespace {

double rel(cplx got, cplx want) { return std::abs(got - want) / std::max(std::abs(want), 1e-300); }

}  // namespace

TEST_CASE("legendre coefficients") {
  CHECK(legendre_coeffs(0).coeffs == std::vector<double>{1.0});
  const auto p2 = legendre_coeffs(2).coeffs;
  REQUIRE(p2.size() == 3);
  CHECK(p2[0] == doctest::Approx(-0.5));
  CHECK(p2[1] == 0.0);
  CHECK(p2[2] == doctest::Approx(1.5));
  for (std::size_t n : {3u, 10u, 25u}) {
    double s = 0.0, mag = 0.0;
    for (double c : legendre_coeffs(n).coeffs) s += c, mag += std::abs(c);
    CHECK(std::abs(s - 1.0) <= 1e-14 * mag);
  }
  CHECK_THROWS_AS(legendre_coeffs(201), DomainError);
  // power-basis evaluation agrees with the recurrence at moderate order
  for (double x : {-0.7, 0.2, 0.9}) CHECK(legendre_coeffs(12)(x) == doctest::Approx(legendre_p(12, x)).epsilon(1e-12));
}

TEST_CASE("hermite coefficients") {
  CHECK(hermite_coeffs(0).coeffs == std::vector<double>{1.0});
  CHECK(hermite_coeffs(2).coeffs == std::vector<double>{-2.0, 0.0, 4.0});
  CHECK(hermite_coeffs(3).coeffs == std::vector<double>{0.0, -12.0, 0.0, 8.0});
  CHECK(hermite_coeffs(20).coeffs.back() == std::ldexp(1.0, 20));
  CHECK_THROWS_AS(hermite_coeffs(201), DomainError);
}

TEST_CASE("laguerre") {
  CHECK(laguerre_eval(5, 0.0) == 1.0);
  CHECK(laguerre_eval(1, 2.0) == doctest::Approx(-1.0));
  CHECK(laguerre_eval(2, 1.0) == doctest::Approx(-0.5));
  std::vector<double> all(8);
  laguerre_all(3.5, all);
  for (std::size_t n = 0; n < all.size(); ++n) CHECK(all[n] == doctest::Approx(std::laguerre(n, 3.5)).epsilon(1e-13));
}

TEST_CASE("spherical bessel: closed forms and frozen references") {
  CHECK(std::abs(spherical_bessel_j(0, pi)) < 1e-14);
  CHECK(spherical_bessel_j(3, 0.0) == cplx(0.0));
  CHECK(spherical_bessel_j(0, 0.0) == cplx(1.0));
  // high-precision references (40 digits)
  struct Ref {
    std::size_t n;
    cplx z, v;
  };
  const Ref refs[] = {
      {5, {0.1, 0}, {9.6163102329164460441e-10, 0}},
      {0, {3, 2}, {-0.42987430163276926832, -0.91027199557341380512}},
      {7, {3, 2}, {-0.0027689538649408030935, -0.0019608812785227454951}},
      {30, {10, -5}, {7.6034262437538702829e-12, -4.5029113429880417697e-12}},
      {150, {400, 3}, {-0.020736771770186065986, -0.0033079750200890898847}},
      {200, {50, 10}, {6.7271015009004271525e-97, 3.856523430850462054e-97}},
      {3, {0.5, 0.5}, {-0.0023140680892910375489, 0.0024463335862579484954}},
      {60, {120, 0}, {-0.0043900734522559618384, 0}},
  };
  for (const auto& r : refs) {
    CAPTURE(r.n);
    CAPTURE(r.z);
    CHECK(rel(spherical_bessel_j(r.n, r.z), r.v) < 1e-12);
  }
}

TEST_CASE("spherical bessel: real arguments against libstdc++") {
  for (double x : {0.3, 2.0, 17.5, 80.0, 300.0})
    for (unsigned n : {0u, 1u, 4u, 20u, 90u}) {
      const double want = std::sph_bessel(n, x);
      if (std::abs(want) < 1e-250) continue;
      CAPTURE(n);
      CAPTURE(x);
      // near a zero the envelope 1/x is the meaningful scale
      CHECK(std::abs(spherical_bessel_j(n, x).real() - want) <= 1e-12 * std::max(std::abs(want), 1.0 / x));
    }
}

TEST_CASE("spherical bessel: three-term recurrence at random points") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> re(-60.0, 60.0), im(-10.0, 10.0);
  for (int trial = 0; trial < 40; ++trial) {
    const cplx z(re(rng), im(rng));
    const auto j = spherical_bessel_j_all(80, z);
    for (std::size_t n = 1; n < 80; ++n) {
      const cplx lhs = j[n - 1] + j[n + 1], rhs = double(2 * n + 1) * j[n] / z;
      const double scale = std::abs(j[n - 1]) + std::abs(j[n + 1]) + std::abs(rhs);
      if (scale < 1e-290) continue;
      CHECK(std::abs(lhs - rhs) <= 1e-10 * scale);
    }
  }
}

TEST_CASE("legendre Q: closed forms, references, recurrence") {
  CHECK(legendre_q(0, 3.0).real() == doctest::Approx(0.5 * std::log(2.0)).epsilon(1e-15));
  CHECK(legendre_q(1, 3.0).real() == doctest::Approx(1.5 * std::log(2.0) - 1.0).epsilon(1e-13));
  struct Ref {
    std::size_t n;
    cplx z, v;
  };
  const Ref refs[] = {
      {4, {2, 1}, {-0.00044260313418282350801, -0.00029241679934799337043}},
      {10, {1.1, 0.01}, {0.0050756364756116332194, -0.0013172735154547040319}},
      {30, {0.3, 0.5}, {-4.9934984531403534519e-8, -2.2997892300575321733e-8}},
      {25, {-3, 0.2}, {-1.0844986860834427324e-21, 3.9782809186529389496e-21}},
      {2, {0.5, -0.3}, {-0.33453247986760124047, -0.079499153609435938091}},
  };
  for (const auto& r : refs) {
    CAPTURE(r.n);
    CHECK(rel(legendre_q(r.n, r.z), r.v) < 1e-11);
  }
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> ang(0, 2 * pi), rad(1.5, 6.0);
  for (int trial = 0; trial < 30; ++trial) {
    const cplx z = std::polar(rad(rng), ang(rng));
    const auto q = legendre_q_all(31, z);
    for (std::size_t n = 1; n <= 30; ++n) {
      const cplx res = double(n + 1) * q[n + 1] - double(2 * n + 1) * z * q[n] + double(n) * q[n - 1];
      const double scale = double(n + 1) * std::abs(q[n + 1]) + double(2 * n + 1) * std::abs(z * q[n]) + n * std::abs(q[n - 1]);
      CHECK(std::abs(res) <= 1e-10 * scale);
    }
  }
  CHECK_THROWS_AS(legendre_q(3, 0.5), DomainError);
  CHECK_THROWS_AS(legendre_q(0, cplx(-1.0, 0.0)), DomainError);
}

TEST_CASE("legendre_q far from the cut") {
  // reached by the MFS image when x is tiny next to the source distance
  const auto rel = [](cplx a, cplx b) { return std::abs(a - b) / std::abs(b); };
  struct Ref {
    cplx z;
    cplx v[3];  // n = 0, 3, 10
  };
  const Ref refs[] = {
      {{1e4, 0}, {{0.00010000000033333334, 0}, {5.7142857777777784e-18, 0}, {2.6392596809391547e-48, 0}}},
      {{0.6e8, -0.8e8},
       {{5.9999999999999997e-9, 8.0000000000000001e-9},
        {-4.8182857142857138e-34, -3.0720000000000004e-34},
        {-1.8846754436003618e-92, -1.8476173131768132e-92}}},
      {{-1.5e16, 2.0e16},
       {{-2.4e-17, -3.2e-17}, {-1.2334811428571429e-67, -7.86432e-68}, {7.9049017517947748e-185, 7.7494686871267589e-185}}},
  };
  for (const auto& r : refs) {
    const auto q = legendre_q_all(10, r.z);
    CHECK(rel(q[0], r.v[0]) < 1e-14);
    CHECK(rel(q[3], r.v[1]) < 1e-12);
    CHECK(rel(q[10], r.v[2]) < 1e-12);
  }
}

TEST_CASE("antiderivative: exactness, direction, breaks") {
  const Grid g = Grid::symmetric(1.0, 40);
  std::vector<double> ones(g.size(), 1.0), p(g.size());
  auto F = antiderivative<double>(ones, g);
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(F[i] == doctest::Approx(g[i]).epsilon(1e-14));
  for (int deg = 1; deg <= 5; ++deg) {
    for (std::size_t i = 0; i < g.size(); ++i) p[i] = (deg + 1) * std::pow(g[i], deg);
    F = antiderivative<double>(p, g);
    for (std::size_t i = 0; i < g.size(); ++i) CHECK(std::abs(F[i] - std::pow(g[i], deg + 1)) <= 1e-14);
  }
  const Grid h = Grid(0.0, pi, 200);
  p.resize(h.size());
  for (std::size_t i = 0; i < h.size(); ++i) p[i] = std::cos(h[i]);
  F = antiderivative<double>(p, h);
  CHECK(std::abs(F.back()) < 1e-10);

  // stencils never straddle a break: a kinked integrand is still exact piecewise
  Grid gb = Grid::symmetric(1.0, 60);
  const double br[] = {0.5};
  gb.set_breaks(br);
  std::vector<double> kink(gb.size());
  for (std::size_t i = 0; i < gb.size(); ++i) kink[i] = gb[i] < 0.5 ? 1.0 : 1.0 + 3.0 * (gb[i] - 0.5) * (gb[i] - 0.5);
  F = antiderivative<double>(kink, gb);
  CHECK(std::abs(F.back() - (1.0 + 0.125)) < 1e-13);
}

TEST_CASE("antiderivative converges at high order") {
  auto err = [](std::size_t m) {
    const Grid g(0.0, 2.0, m);
    std::vector<double> s(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) s[i] = std::exp(g[i]) * std::sin(3 * g[i]);
    const auto F = antiderivative<double>(s, g);
    double e = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double x = g[i];
      const double exact = (std::exp(x) * (std::sin(3 * x) - 3 * std::cos(3 * x)) + 3.0) / 10.0;
      e = std::max(e, std::abs(F[i] - exact));
    }
    return e;
  };
  CHECK(err(40) / err(80) > 16.0);
}

TEST_CASE("interpolation") {
  const Grid g = Grid::symmetric(2.0, 64);
  std::vector<double> s(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) s[i] = g[i] * g[i] * g[i] - g[i];
  for (double x : {-1.97, -0.3, 0.01, 1.5, 2.0}) CHECK(interpolate<double>(g, s, x) == doctest::Approx(x * x * x - x).epsilon(1e-13));
}

TEST_CASE("lstsq") {
  Matrix<double> id(3, 3);
  for (int i = 0; i < 3; ++i) id(i, i) = 1.0;
  const double b3[] = {1, 2, 3};
  auto r = lstsq<double>(id, b3);
  CHECK(r.x == std::vector<double>{1, 2, 3});
  CHECK(r.residual_norm == doctest::Approx(0.0));

  Matrix<double> col(2, 1);
  col(0, 0) = col(1, 0) = 1.0;
  const double b2[] = {0, 2};
  r = lstsq<double>(col, b2);
  CHECK(r.x[0] == doctest::Approx(1.0));
  CHECK(r.residual_norm == doctest::Approx(std::sqrt(2.0)));

  // planted solution plus noise orthogonal to the column space
  std::mt19937_64 rng(3);
  std::normal_distribution<double> nd;
  Matrix<double> a(20, 5);
  for (std::size_t i = 0; i < 20; ++i)
    for (std::size_t j = 0; j < 5; ++j) a(i, j) = nd(rng);
  std::vector<double> x0{1.5, -2.0, 0.25, 3.0, -0.75}, noise(20);
  for (auto& v : noise) v = nd(rng);
  for (int pass = 0; pass < 2; ++pass) {  // Gram-Schmidt twice against the columns
    std::vector<std::vector<double>> q;
    for (std::size_t j = 0; j < 5; ++j) {
      std::vector<double> c(20);
      for (std::size_t i = 0; i < 20; ++i) c[i] = a(i, j);
      for (const auto& qq : q) {
        double d = 0;
        for (std::size_t i = 0; i < 20; ++i) d += qq[i] * c[i];
        for (std::size_t i = 0; i < 20; ++i) c[i] -= d * qq[i];
      }
      double nrm = 0;
      for (double v : c) nrm += v * v;
      for (auto& v : c) v /= std::sqrt(nrm);
      q.push_back(c);
    }
    for (const auto& qq : q) {
      double d = 0;
      for (std::size_t i = 0; i < 20; ++i) d += qq[i] * noise[i];
      for (std::size_t i = 0; i < 20; ++i) noise[i] -= d * qq[i];
    }
  }
  std::vector<double> b(20);
  for (std::size_t i = 0; i < 20; ++i) {
    b[i] = noise[i];
    for (std::size_t j = 0; j < 5; ++j) b[i] += a(i, j) * x0[j];
  }
  r = lstsq<double>(a, b);
  for (std::size_t j = 0; j < 5; ++j) CHECK(std::abs(r.x[j] - x0[j]) < 1e-12);
  // residual orthogonal to the column space
  double bn = 0, atr = 0;
  for (double v : b) bn += v * v;
  for (std::size_t j = 0; j < 5; ++j) {
    double d = 0;
    for (std::size_t i = 0; i < 20; ++i) {
      double res = b[i];
      for (std::size_t k = 0; k < 5; ++k) res -= a(i, k) * r.x[k];
      d += a(i, j) * res;
    }
    atr += d * d;
  }
  CHECK(std::sqrt(atr) <= 1e-10 * a.frobenius_norm() * std::sqrt(bn));

  Matrix<double> rankdef(4, 2);
  for (std::size_t i = 0; i < 4; ++i) rankdef(i, 0) = rankdef(i, 1) = double(i + 1);
  const double b4[] = {1, 2, 3, 4};
  CHECK_THROWS_AS(lstsq<double>(rankdef, b4), RankDeficient);
  const auto piv = lstsq_pivoted<double>(rankdef, b4);
  CHECK(piv.residual_norm < 1e-12);
}

TEST_CASE("ode oracle") {
  const Potential zero;
  auto s = ode_oracle(zero, 3.0, 1.0);
  CHECK(std::abs(s.u - std::exp(cplx(0, 3))) < 1e-12);
  CHECK(std::abs(s.du - cplx(0, 3) * std::exp(cplx(0, 3))) < 1e-11);

  const auto one = Potential::constant(1.0);
  const double om = std::sqrt(24.0);
  s = ode_oracle(one, 5.0, 1.0);
  CHECK(std::abs(s.u - cplx(std::cos(om), 5.0 * std::sin(om) / om)) < 1e-12);

  const auto minus_one = Potential::constant(-1.0);
  s = ode_oracle(minus_one, 0.0, 1.0);
  CHECK(std::abs(s.u - std::cos(1.0)) < 1e-13);

  // negative abscissae
  s = ode_oracle(one, 5.0, -1.0);
  CHECK(std::abs(s.u - cplx(std::cos(om), -5.0 * std::sin(om) / om)) < 1e-12);

  const auto ex = Potential::from_function([](double x) { return cplx(std::exp(x)); }, true, "exp(x)");
  const auto a = ode_oracle(ex, 7.0, 2.0, 1e-10), b = ode_oracle(ex, 7.0, 2.0, 2e-10);
  CHECK(std::abs(a.u - b.u) < 2e-10);
  CHECK_THROWS_AS(ode_oracle(ex, 1.0, 1.0, 1e-14), DomainError);
}

TEST_CASE("csv number formatting round-trips") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int i = 0; i < 1000; ++i) {
    const double v = u(rng) * std::pow(10.0, (i % 40) - 20);
    CHECK(csv::to_double(csv::format(v)) == v);
  }
}
