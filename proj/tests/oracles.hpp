#pragma once

// Independent reference values used across the test binaries.  Nothing here
// goes through formal powers or the kernel coefficients.

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/special_functions/bessel.hpp>

#include "transmute/ode.hpp"
#include "transmute/potential.hpp"

namespace oracle {

using transmute::cplx;

// u'' = (c - w^2) u, u(0) = 1, u'(0) = i w.
inline cplx constant_u(cplx c, cplx omega, double x) {
  const cplx big = std::sqrt(omega * omega - c);
  const cplx i(0.0, 1.0);
  if (std::abs(big * x) < 1e-8) return 1.0 + i * omega * x;
  return std::cos(big * x) + i * omega * std::sin(big * x) / big;
}

// Kernel for q = c >= 0: (c/2)(x+t) I_1(s)/s, s = sqrt(c (x^2 - t^2)).
inline double constant_kernel(double c, double x, double t) {
  const double s = std::sqrt(std::max(0.0, c * (x * x - t * t)));
  const double r = s < 1e-6 ? 0.5 + s * s / 16.0 : boost::math::cyl_bessel_i(1, s) / s;
  return 0.5 * c * (x + t) * r;
}

// Composite 30-point Gauss-Legendre on `panels` equal pieces of [a, b].
template <class F>
auto gauss(F f, double a, double b, int panels = 8) {
  using boost::math::quadrature::gauss;
  const double w = (b - a) / panels;
  decltype(f(a)) acc{};
  for (int p = 0; p < panels; ++p) acc += gauss<double, 30>::integrate(f, a + p * w, a + (p + 1) * w);
  return acc;
}

// Goursat problem in characteristic variables u = (x+t)/2, v = (x-t)/2:
//   H(u, v) = 1/2 int_0^u q + int_0^u int_0^v q(a+b) H(a, b) db da,
// solved by successive approximations on an n x n trapezoid grid; three
// refinements are combined by Richardson extrapolation (error O(h^6)).
namespace detail {
inline cplx goursat_once(const transmute::Potential& q, double u, double v, int n) {
  const double du = u / n, dv = v / n;
  const auto at = [n](int i, int j) { return static_cast<std::size_t>(i) * (n + 1) + j; };
  std::vector<cplx> qq((n + 1) * (n + 1)), h0(n + 1), h((n + 1) * (n + 1)), next(h.size());
  for (int i = 0; i <= n; ++i)
    for (int j = 0; j <= n; ++j) qq[at(i, j)] = q(i * du + j * dv);
  // 1/2 int_0^{u_i} q by the trapezoid rule
  h0[0] = 0.0;
  for (int i = 1; i <= n; ++i) h0[i] = h0[i - 1] + 0.25 * du * (q((i - 1) * du) + q(i * du));
  for (int i = 0; i <= n; ++i)
    for (int j = 0; j <= n; ++j) h[at(i, j)] = h0[i];
  std::vector<cplx> col(h.size());
  for (int it = 0; it < 200; ++it) {
    // cumulative trapezoid in v, then in u
    for (int i = 0; i <= n; ++i) {
      col[at(i, 0)] = 0.0;
      for (int j = 1; j <= n; ++j)
        col[at(i, j)] = col[at(i, j - 1)] + 0.5 * dv * (qq[at(i, j - 1)] * h[at(i, j - 1)] + qq[at(i, j)] * h[at(i, j)]);
    }
    double change = 0.0, scale = 0.0;
    for (int j = 0; j <= n; ++j) {
      cplx acc = 0.0;
      next[at(0, j)] = h0[0];
      for (int i = 1; i <= n; ++i) {
        acc += 0.5 * du * (col[at(i - 1, j)] + col[at(i, j)]);
        next[at(i, j)] = h0[i] + acc;
      }
    }
    for (std::size_t k = 0; k < h.size(); ++k) {
      change = std::max(change, std::abs(next[k] - h[k]));
      scale = std::max(scale, std::abs(next[k]));
    }
    h.swap(next);
    if (change <= 1e-16 * (1.0 + scale)) break;
  }
  return h[at(n, n)];
}
}  // namespace detail

inline cplx goursat_kernel(const transmute::Potential& q, double x, double t, int n = 200) {
  const double u = 0.5 * (x + t), v = 0.5 * (x - t);
  const cplx a = detail::goursat_once(q, u, v, n), b = detail::goursat_once(q, u, v, 2 * n),
             c = detail::goursat_once(q, u, v, 4 * n);
  const cplx ab = (4.0 * b - a) / 3.0, bc = (4.0 * c - b) / 3.0;
  return (16.0 * bc - ab) / 15.0;
}

// Eigenvalue of -y'' + q y = w^2 y on [0, b] with a y + b y' = 0 at each end,
// by bisection on the reference integrator's boundary functional.  The
// root must be the only one in [lo, hi]; `imag` bisects in kappa, w = i kappa.
struct Ends {
  double a0 = 1.0, b0 = 0.0, a1 = 1.0, b1 = 0.0;
};

inline double shooting_eigenvalue(const transmute::Potential& q, double b, double lo, double hi, Ends e = {},
                                  bool imag = false) {
  const auto f = [&](double t) {
    const double xs[] = {b};
    const cplx w = imag ? cplx(0.0, t) : cplx(t);
    const auto s = transmute::integrate_ivp(q, w, -e.b0, e.a0, xs, transmute::kMinOdeTolerance)[0];
    return e.a1 * s.u.real() + e.b1 * s.du.real();
  };
  double fa = f(lo);
  for (int i = 0; i < 200 && hi - lo > 1e-15 * std::max(1.0, hi); ++i) {
    const double m = 0.5 * (lo + hi), fm = f(m);
    if ((fm < 0.0) == (fa < 0.0)) {
      lo = m;
      fa = fm;
    } else {
      hi = m;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace oracle
