#include "transmute/kernel_legendre.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <ostream>
#include <string>

#include "tail_window.hpp"
#include "transmute/csv.hpp"

namespace transmute {

namespace {

constexpr cplx kI{0.0, 1.0};

// beta_0 = (f - 1)/2 and beta_1 = 3/2 (phi_1/x - 1) seed the recurrence.
//
// With sigma_n = x^n beta_n and L = d^2/dx^2 - q one finds
//   L[x^n beta_n] = (2n+1)/(2n-3) x^{2n-1} L[x^{1-n} beta_{n-2}],
// and integrating twice against the seed f (variation of constants) gives
//   beta_n = (2n+1)/(2n-3) [ beta_{n-2} - 2(2n-1) x^{-n} f(x)
//              int_0^x f^{-2} ( f s^{n-1} beta_{n-2}
//                 - int_0^s (f' t^{n-1} + (n-1) f t^{n-2}) beta_{n-2} dt ) ds ].
//
// Near x = 0 the true beta_n is O(x^{n+1}), but rounding leaves components
// a f + b phi_1 in x^n beta_n which the division by x^n turns into noise
// growing like x^{1-n}; fed into the next step it grows without bound.  So
// after each step, on each side of 0, the envelope max_{[k,2k]} |beta_n| is
// followed outward from the origin while it falls; at its minimum (the point
// where signal overtakes noise) beta_n is replaced inside by the power law.
constexpr double kNoiseRise = 100.0;

void trim_near_zero(Samples& b, const Grid& g, double power) {
  const std::size_t z = g.zero_index();
  for (int side : {+1, -1}) {
    const std::size_t nodes = side > 0 ? g.size() - 1 - z : z;
    if (nodes < 2) continue;
    auto idx = [&](std::size_t k) { return side > 0 ? z + k : z - k; };
    // both ends of [k, 2k] only move outward: sliding maximum, linear overall
    std::deque<std::size_t> win;
    std::size_t pushed = 0;
    auto env = [&](std::size_t k) {
      while (pushed < std::min(2 * k, nodes)) {
        const std::size_t j = ++pushed;
        const double a = std::abs(b[idx(j)]);
        while (!win.empty() && std::abs(b[idx(win.back())]) <= a) win.pop_back();
        win.push_back(j);
      }
      while (win.front() < k) win.pop_front();
      return std::abs(b[idx(win.front())]);
    };
    std::size_t kc = 1;
    double lo = env(1);
    for (std::size_t k = 2; k <= nodes / 2; ++k) {
      const double e = env(k);
      if (e < lo) {
        lo = e;
        kc = k;
      } else if (e > kNoiseRise * lo) {
        break;
      }
    }
    for (std::size_t k = 1; k < kc; ++k)
      b[idx(k)] = b[idx(kc)] * std::pow(static_cast<double>(k) / static_cast<double>(kc), power);
  }
}

std::vector<Samples> betas_by_recurrence(const FormalPowersTable& t, std::size_t count) {
  const Grid& g = t.grid;
  const std::size_t m = g.size(), z = g.zero_index();
  std::vector<Samples> beta(count, Samples(m));
  if (count == 0) return beta;
  for (std::size_t i = 0; i < m; ++i) beta[0][i] = 0.5 * (t.f[i] - 1.0);
  if (count == 1) return beta;
  for (std::size_t i = 0; i < m; ++i) beta[1][i] = i == z ? cplx(0.0) : 1.5 * (t.phi[1][i] / g[i] - 1.0);

  Samples w(m);
  for (std::size_t n = 2; n < count; ++n) {
    const Samples& bm = beta[n - 2];
    const double nn = static_cast<double>(n);
    for (std::size_t i = 0; i < m; ++i) {
      const double x = g[i];
      const double xn2 = n == 2 ? 1.0 : std::pow(x, nn - 2.0);
      w[i] = (t.f_prime[i] * (xn2 * x) + (nn - 1.0) * t.f[i] * xn2) * bm[i];
    }
    const Samples inner = antiderivative<cplx>(w, g);
    for (std::size_t i = 0; i < m; ++i) {
      const double x = g[i];
      w[i] = (t.f[i] * std::pow(x, nn - 1.0) * bm[i] - inner[i]) / (t.f[i] * t.f[i]);
    }
    const Samples outer = antiderivative<cplx>(w, g);
    const double c = (2.0 * nn + 1.0) / (2.0 * nn - 3.0);
    Samples& b = beta[n];
    for (std::size_t i = 0; i < m; ++i) {
      if (i == z) {
        b[i] = 0.0;
        continue;
      }
      const double x = g[i];
      const cplx v = c * (bm[i] - 2.0 * (2.0 * nn - 1.0) * (t.f[i] * outer[i]) / std::pow(x, nn));
      b[i] = (std::isfinite(v.real()) && std::isfinite(v.imag())) ? v : cplx(0.0);
    }
    trim_near_zero(b, g, nn + 1.0);
  }
  return beta;
}

std::vector<Samples> betas_direct(const FormalPowersTable& t, std::size_t count) {
  if (count > t.k_max + 1)
    throw DomainError("build_beta: direct formula needs formal powers up to order " + std::to_string(count - 1));
  const Grid& g = t.grid;
  const std::size_t m = g.size(), z = g.zero_index();
  std::vector<PolynomialCoeffs> l;
  for (std::size_t n = 0; n < count; ++n) l.push_back(legendre_coeffs(n));

  // ratios phi_k / x^k; close to 0 they are replaced by 1 plus a linear
  // correction read off the node four steps out on the same side
  std::vector<Samples> ratio(count, Samples(m, 1.0));
  for (std::size_t k = 1; k < count; ++k)
    for (std::size_t i = 0; i < m; ++i)
      if (i != z) ratio[k][i] = t.phi[k][i] / std::pow(g[i], static_cast<double>(k));
  constexpr std::size_t kNear = 4;
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t d = i > z ? i - z : z - i;
    if (d == 0 || d >= kNear) continue;
    const std::size_t s = i > z ? z + kNear : (z >= kNear ? z - kNear : m);
    if (s >= m) continue;
    const double frac = g[i] / g[s];
    for (std::size_t k = 1; k < count; ++k) ratio[k][i] = 1.0 + (ratio[k][s] - 1.0) * frac;
  }

  std::vector<Samples> beta(count, Samples(m));
  for (std::size_t n = 0; n < count; ++n) {
    const double pref = (2.0 * n + 1.0) / 2.0;
    for (std::size_t i = 0; i < m; ++i) {
      if (i == z) continue;
      CompensatedSum<cplx> acc;
      for (std::size_t k = 0; k <= n; ++k)
        if (l[n].coeffs[k] != 0.0) acc.add(l[n].coeffs[k] * (k == 0 ? t.f[i] : ratio[k][i]));
      acc.add(-1.0);
      beta[n][i] = pref * acc.value();
    }
  }
  return beta;
}

// beta_n from the recurrence carry absolute noise of order 1e-15..1e-14
// once the true values have decayed below it.
constexpr double kStagnationFloor = 1e-11;

struct NodeTail {
  double eps;
  bool stagnant;
};

// Parseval energy (2/|x|) sum |beta_n|^2/(2n+1) over the margin window.
NodeTail node_tail(const std::vector<Samples>& beta, std::size_t order, std::size_t i, double x) {
  const std::size_t total = beta.size();
  if (x == 0.0 || total <= order + 1) return {0.0, false};
  double scale = 0.0;
  for (std::size_t n = 0; n <= order; ++n) scale = std::max(scale, std::abs(beta[n][i]));
  std::vector<double> terms;
  for (std::size_t n = order + 1; n < total; ++n) terms.push_back(std::norm(beta[n][i]) / (2.0 * n + 1.0));
  const auto w = detail::window_energy(terms);
  // a flat window near the roundoff floor of the recurrence is noise, not a
  // slowly converging series
  const bool stagnant = w.flat && std::sqrt(w.energy) > kStagnationFloor * (1.0 + scale);
  return {std::sqrt(2.0 / std::abs(x) * w.energy), stagnant};
}

}  // namespace

LegendreKernel build_beta(const FormalPowersTable& powers, std::size_t order, LegendreOptions options) {
  if (options.method == BetaMethod::recurrence && powers.k_max < 1)
    throw DomainError("build_beta: formal powers up to order 1 are required");
  const std::size_t count = order + options.margin + 1;
  LegendreKernel k{powers.grid, order, options.margin, {}, {}, {}};
  k.beta = options.method == BetaMethod::recurrence ? betas_by_recurrence(powers, count)
                                                    : betas_direct(powers, count);
  const Grid& g = k.grid;
  k.tail.resize(g.size());
  std::size_t stagnant = 0;
  double worst_x = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto nt = node_tail(k.beta, order, i, g[i]);
    k.tail[i] = nt.eps;
    if (nt.stagnant && !stagnant++) worst_x = g[i];
  }
  if (stagnant)
    k.diagnostics.warn(WarningCode::TailStagnant,
                       "beta_n not decaying over the tail window at " + std::to_string(stagnant) +
                           " nodes (first at x = " + std::to_string(worst_x) +
                           "); raise N or refine the grid");
  return k;
}

cplx LegendreKernel::beta_at(std::size_t n, double x) const {
  if (n >= beta.size()) throw DomainError("beta index beyond the tabulated order");
  std::size_t idx;
  if (grid.node_index(x, idx)) return beta[n][idx];
  if (!grid.contains(x)) throw DomainError("x outside the kernel grid");
  return interpolate<cplx>(grid, beta[n], x);
}

void LegendreKernel::betas_at(double x, std::span<cplx> out) const {
  if (out.size() > beta.size()) throw DomainError("beta index beyond the tabulated order");
  std::size_t idx;
  if (grid.node_index(x, idx)) {
    for (std::size_t n = 0; n < out.size(); ++n) out[n] = beta[n][idx];
    return;
  }
  if (!grid.contains(x)) throw DomainError("x outside the kernel grid");
  for (std::size_t n = 0; n < out.size(); ++n) out[n] = interpolate<cplx>(grid, beta[n], x);
}

cplx kernel_eval(const LegendreKernel& kern, double x, double t) {
  if (!(std::abs(t) <= std::abs(x))) throw DomainError("kernel_eval: |t| > |x|");
  if (x == 0.0) return 0.0;
  const std::size_t n1 = kern.order + 1;
  std::vector<cplx> b(n1);
  kern.betas_at(x, b);
  std::vector<double> p(n1);
  legendre_p_all(t / x, p);
  CompensatedSum<cplx> acc;
  for (std::size_t n = 0; n < n1; ++n) acc.add(b[n] * p[n]);
  return acc.value() / x;
}

cplx solve_u_nsbf(const LegendreKernel& kern, cplx omega, double x) {
  const std::size_t n1 = kern.order + 1;
  std::vector<cplx> b(n1), j(n1);
  kern.betas_at(x, b);
  spherical_bessel_j_all(omega * x, j);
  cplx in(1.0), sum(0.0);
  for (std::size_t n = 0; n < n1; ++n) {
    sum += in * b[n] * j[n];
    in *= kI;
  }
  return std::exp(kI * omega * x) + 2.0 * sum;
}

double plane_wave_norm(cplx omega, double x) {
  const double c = std::abs(omega.imag()), ax = std::abs(x);
  if (c * ax < 1e-8) return std::sqrt(2.0 * ax);
  return std::sqrt(std::sinh(2.0 * c * ax) / c);
}

CertifiedValue solve_u_nsbf_certified(const LegendreKernel& kern, cplx omega, double x) {
  return {solve_u_nsbf(kern, omega, x), tail_estimate(kern, x).eps_hat * plane_wave_norm(omega, x)};
}

double TailReport::strip_bound(double c) const {
  const double ax = std::abs(x);
  if (c * ax < 1e-8) return eps_hat * ax;
  return eps_hat * std::sinh(c * ax) / c;
}

TailReport tail_estimate(const LegendreKernel& kern, double x) {
  TailReport r;
  r.x = x;
  r.eps_hat = detail::tail_at(kern.grid, kern.tail, x);
  std::size_t idx;
  if (kern.grid.node_index(x, idx)) r.stagnant = node_tail(kern.beta, kern.order, idx, kern.grid[idx]).stagnant;
  r.real_bound = r.eps_hat * std::sqrt(2.0 * std::abs(x));
  return r;
}

void write_coefficient_csv(std::ostream& out, const char* rep, const Grid& grid,
                           const std::vector<Samples>& coeffs, std::size_t count) {
  csv::write_row(out, {"rep", "x", "n", "re", "im"});
  count = std::min(count, coeffs.size());
  for (std::size_t i = 0; i < grid.size(); ++i)
    for (std::size_t n = 0; n < count; ++n)
      csv::write_row(out, {rep, csv::format(grid[i]), std::to_string(n), csv::format(coeffs[n][i].real()),
                           csv::format(coeffs[n][i].imag())});
}

void write_kernel_csv(std::ostream& out, const LegendreKernel& kern) {
  write_coefficient_csv(out, "legendre", kern.grid, kern.beta, kern.order + 1);
}

void write_solution_csv(std::ostream& out, std::span<const SolutionRow> rows, const char* rep) {
  csv::write_row(out, {"rep", "omega_re", "omega_im", "x", "u_re", "u_im", "eps"});
  for (const auto& r : rows)
    csv::write_row(out, {rep, csv::format(r.omega.real()), csv::format(r.omega.imag()), csv::format(r.x),
                         csv::format(r.u.real()), csv::format(r.u.imag()), csv::format(r.eps)});
}

}  // namespace transmute
