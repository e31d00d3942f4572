#include "transmute/alt_representations.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "tail_window.hpp"
#include "transmute/kernel_legendre.hpp"

namespace transmute {

namespace {

constexpr cplx kI{0.0, 1.0};

struct Counted {
  std::size_t count = 0;
  std::size_t first_n = 0;
  double first_x = 0.0;

  void hit(std::size_t n, double x) {
    if (!count++) {
      first_n = n;
      first_x = x;
    }
  }
};

void report_cancellation(Diagnostics& diag, const Counted& c, const char* name) {
  if (!c.count) return;
  diag.warn(WarningCode::Cancellation,
            std::to_string(c.count) + " values of " + name + " lost all but 12 digits to cancellation (first " + name +
                "_" + std::to_string(c.first_n) + " at x = " + std::to_string(c.first_x) + ")");
}

std::size_t check_order(const FormalPowersTable& powers, std::size_t order, std::size_t cap, const char* what) {
  if (order > cap) throw DomainError(std::string(what) + ": order above the cap of " + std::to_string(cap));
  if (order > powers.k_max)
    throw DomainError(std::string(what) + ": formal powers up to order " + std::to_string(order) + " are required");
  return std::min(powers.k_max, std::min(order + kAltTailMargin, cap)) + 1;
}

// phi_j(x) - x^j, j = 0..count-1 at node i
void excess(const FormalPowersTable& t, std::size_t i, std::span<cplx> out) {
  const double x = t.grid[i];
  double xp = 1.0;
  for (std::size_t j = 0; j < out.size(); ++j) {
    out[j] = t.phi[j][i] - xp;
    xp *= x;
  }
}

cplx coefficient_at(const Grid& grid, const std::vector<Samples>& c, std::size_t n, double x) {
  if (n >= c.size()) throw DomainError("coefficient index beyond the tabulated order");
  std::size_t idx;
  if (grid.node_index(x, idx)) return c[n][idx];
  if (!grid.contains(x)) throw DomainError("x outside the kernel grid");
  return interpolate<cplx>(grid, c[n], x);
}

std::vector<cplx> coefficients_at(const Grid& grid, const std::vector<Samples>& c, std::size_t count, double x) {
  std::vector<cplx> out(count);
  for (std::size_t n = 0; n < count; ++n) out[n] = coefficient_at(grid, c, n, x);
  return out;
}

void fill_tail(std::vector<double>& tail, const std::vector<Samples>& c, std::size_t order,
               double (*energy)(cplx, std::size_t), Diagnostics& diag) {
  const std::size_t m = c.empty() ? 0 : c[0].size();
  tail.assign(m, std::numeric_limits<double>::infinity());
  if (c.size() <= order + 1) return;
  Counted flat;
  std::vector<double> terms;
  for (std::size_t i = 0; i < m; ++i) {
    terms.clear();
    for (std::size_t n = order + 1; n < c.size(); ++n) terms.push_back(energy(c[n][i], n));
    auto w = detail::window_energy(terms);
    if (w.flat && w.energy > 0.0) {
      // algebraic decay (k(x, .) has a corner where the extension cuts it
      // off): take |c_n| ~ 1/n beyond the window, sum_{n>M} M^2/n^2 ~ M
      const double top = static_cast<double>(c.size() - 1);
      w.energy += w.energy / static_cast<double>(terms.size()) * top;
      flat.hit(order, 0.0);
    }
    tail[i] = std::sqrt(w.energy);
  }
  if (flat.count)
    diag.warn(WarningCode::TailStagnant, "coefficients not decaying geometrically over the tail window at " +
                                             std::to_string(flat.count) + " nodes; tail extrapolated as 1/n");
}

}  // namespace

cplx LaguerreKernel::a_at(std::size_t n, double x) const { return coefficient_at(grid, a, n, x); }
cplx HermiteKernel::c_at(std::size_t n, double x) const { return coefficient_at(grid, c, n, x); }

// a_n = sum_j (-1)^j (phi_j - x^j) sum_k (-1)^k n!/((n-k)! k! (k-j)! j!) x^{k-j}.
// The inner sum is (-1)^j L_{n-j}^{(j)}(x)/j!, a generalised Laguerre
// polynomial, and is evaluated by its three-term recurrence in the degree:
// the power form alternates and cancels as badly as the outer sum.
LaguerreKernel build_a(const FormalPowersTable& powers, std::size_t order) {
  const std::size_t count = check_order(powers, order, kMaxLaguerreOrder, "build_a");
  const Grid& g = powers.grid;
  const std::size_t m = g.size();
  LaguerreKernel k{g, order, count - order - 1, std::vector<Samples>(count, Samples(m)), {}, {}};

  std::vector<cplx> d(count);
  std::vector<double> lag(count * count), inv_fact(count);
  inv_fact[0] = 1.0;
  for (std::size_t j = 1; j < count; ++j) inv_fact[j] = inv_fact[j - 1] / static_cast<double>(j);
  Counted cancelled;
  for (std::size_t i = 0; i < m; ++i) {
    const double x = g[i];
    excess(powers, i, d);
    // lag[j*count + r] = L_r^{(j)}(x) / j!
    for (std::size_t j = 0; j < count; ++j) {
      double* row = &lag[j * count];
      const double al = static_cast<double>(j);
      double prev = 1.0, cur = 1.0 + al - x;
      row[0] = inv_fact[j];
      if (count - j > 1) row[1] = cur * inv_fact[j];
      for (std::size_t r = 1; r + 1 < count - j; ++r) {
        const double rr = static_cast<double>(r);
        const double next = ((2.0 * rr + 1.0 + al - x) * cur - (rr + al) * prev) / (rr + 1.0);
        prev = cur;
        cur = next;
        row[r + 1] = cur * inv_fact[j];
      }
    }
    for (std::size_t n = 0; n < count; ++n) {
      CompensatedSum<cplx> acc;
      double biggest = 0.0;
      for (std::size_t j = 0; j <= n; ++j) {
        acc.add(d[j] * lag[j * count + (n - j)]);
        biggest = std::max(biggest, std::abs(acc.value()));
      }
      const cplx v = acc.value();
      k.a[n][i] = v;
      if (n <= order && std::abs(v) < kCancellationRatio * biggest) cancelled.hit(n, x);
    }
  }
  report_cancellation(k.diagnostics, cancelled, "a");
  fill_tail(k.tail, k.a, order, [](cplx v, std::size_t) { return std::norm(v); }, k.diagnostics);
  return k;
}

// c_n = 1/(sqrt(pi) n! 2^n) sum_k h_{k,n} (phi_k - x^k); the scaled
// coefficients are formed in log space.
HermiteKernel build_c(const FormalPowersTable& powers, std::size_t order) {
  const std::size_t count = check_order(powers, order, kMaxHermiteOrder, "build_c");
  const Grid& g = powers.grid;
  const std::size_t m = g.size();
  HermiteKernel k{g, order, count - order - 1, std::vector<Samples>(count, Samples(m)), {}, {}};

  std::vector<std::vector<double>> scaled(count);
  const double log_sqrt_pi = 0.5 * std::log(M_PI);
  for (std::size_t n = 0; n < count; ++n) {
    const auto h = hermite_coeffs(n);
    const double log_norm = std::lgamma(n + 1.0) + n * std::log(2.0) + log_sqrt_pi;
    scaled[n].resize(n + 1);
    for (std::size_t j = 0; j <= n; ++j) {
      const double hk = h.coeffs[j];
      scaled[n][j] = hk == 0.0 ? 0.0 : std::copysign(std::exp(std::log(std::abs(hk)) - log_norm), hk);
    }
  }
  std::vector<cplx> d(count);
  Counted cancelled;
  for (std::size_t i = 0; i < m; ++i) {
    excess(powers, i, d);
    for (std::size_t n = 0; n < count; ++n) {
      CompensatedSum<cplx> acc;
      double biggest = 0.0;
      for (std::size_t j = n % 2; j <= n; j += 2) {
        acc.add(scaled[n][j] * d[j]);
        biggest = std::max(biggest, std::abs(acc.value()));
      }
      const cplx v = acc.value();
      k.c[n][i] = v;
      if (n <= order && std::abs(v) < kCancellationRatio * biggest) cancelled.hit(n, g[i]);
    }
  }
  report_cancellation(k.diagnostics, cancelled, "c");
  fill_tail(k.tail, k.c, order, [](cplx v, std::size_t n) {
    if (v == 0.0) return 0.0;
    return std::exp(2.0 * std::log(std::abs(v)) + 0.5 * std::log(M_PI) + n * std::log(2.0) + std::lgamma(n + 1.0));
  }, k.diagnostics);
  return k;
}

cplx solve_u_laguerre(const LaguerreKernel& kern, cplx omega, double x) {
  if (!(omega.imag() < 0.5)) throw DomainError("Laguerre series needs Im w < 1/2");
  // the extension lives on (-inf, x] and only covers [-x, x] for x >= 0
  if (x < 0.0) throw DomainError("Laguerre series needs x >= 0");
  const cplx den = 1.0 + kI * omega;
  if (den == 0.0) throw DomainError("Laguerre series has a pole at w = i");
  const cplx r = kI * omega / den;
  const auto a = coefficients_at(kern.grid, kern.a, kern.order + 1, x);
  cplx acc = 0.0;
  for (std::size_t n = a.size(); n-- > 0;) acc = acc * r + a[n];
  return std::exp(kI * omega * x) * (1.0 + acc / den);
}

cplx solve_u_hermite(const HermiteKernel& kern, cplx omega, double x, Diagnostics* diag) {
  if (diag && std::abs(omega) > 2.0 * std::sqrt(static_cast<double>(kern.order)))
    diag->warn(WarningCode::Magnitude, "|w| = " + std::to_string(std::abs(omega)) +
                                           " exceeds 2 sqrt(N); the Hermite series is not resolved");
  const auto c = coefficients_at(kern.grid, kern.c, kern.order + 1, x);
  const cplx iw = kI * omega;
  cplx p = 1.0, sum = 0.0;
  for (const cplx& v : c) {
    sum += v * p;
    p *= iw;
  }
  return std::exp(kI * omega * x) + std::sqrt(M_PI) * std::exp(-omega * omega / 4.0) * sum;
}

cplx kernel_eval_laguerre(const LaguerreKernel& kern, double x, double y) {
  if (!(x > 0.0)) throw DomainError("kernel_eval_laguerre: x must be positive");
  if (!(std::abs(y) <= x)) throw DomainError("kernel_eval_laguerre: |y| > x");
  const auto a = coefficients_at(kern.grid, kern.a, kern.order + 1, x);
  std::vector<double> l(a.size());
  const double s = x - y;
  laguerre_all(s, l);
  CompensatedSum<cplx> acc;
  for (std::size_t n = 0; n < a.size(); ++n) acc.add(a[n] * l[n]);
  return acc.value() * std::exp(-s);
}

double laguerre_bound(const LaguerreKernel& kern, cplx omega, double x) {
  if (!(omega.imag() < 0.5)) throw DomainError("Laguerre bound needs Im w < 1/2");
  return detail::tail_at(kern.grid, kern.tail, x) * std::exp(-omega.imag() * x) /
         std::sqrt(1.0 - 2.0 * omega.imag());
}

double hermite_bound(const HermiteKernel& kern, cplx omega, double x) {
  const double im = omega.imag();
  return std::pow(M_PI, 0.25) * std::exp(0.5 * im * im) * detail::tail_at(kern.grid, kern.tail, x);
}

void write_laguerre_csv(std::ostream& out, const LaguerreKernel& kern) {
  write_coefficient_csv(out, "laguerre", kern.grid, kern.a, kern.order + 1);
}

void write_hermite_csv(std::ostream& out, const HermiteKernel& kern) {
  write_coefficient_csv(out, "hermite", kern.grid, kern.c, kern.order + 1);
}

}  // namespace transmute
