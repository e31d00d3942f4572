#include "transmute/formal_powers.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>

#include "transmute/csv.hpp"
#include "transmute/errors.hpp"
#include "transmute/ode.hpp"

namespace transmute {

namespace {

void check_nonvanishing(const Samples& f, const Grid& grid) {
  double fmin = std::numeric_limits<double>::infinity(), fmax = 0.0;
  std::size_t where = 0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double a = std::abs(f[i]);
    if (!std::isfinite(a)) throw SeedVanishes("seed solution is not finite on the grid");
    if (a < fmin) {
      fmin = a;
      where = i;
    }
    fmax = std::max(fmax, a);
  }
  const std::string advice = "; shrink the interval or shift q by a complex constant";
  if (fmin < kSeedVanishThreshold * fmax)
    throw SeedVanishes("seed solution f nearly vanishes at x = " + std::to_string(grid[where]) +
                       " (min|f|/max|f| = " + std::to_string(fmin / fmax) + ")" + advice);
  // A zero strictly between nodes: f turns by 90 degrees or more in one step
  // (a sign change for real q).
  for (std::size_t i = 0; i + 1 < f.size(); ++i)
    if (std::real(f[i] * std::conj(f[i + 1])) <= 0.0)
      throw SeedVanishes("seed solution f has a zero between x = " + std::to_string(grid[i]) +
                         " and x = " + std::to_string(grid[i + 1]) + advice);
}

}  // namespace

Seed solve_seed(const Potential& q, const Grid& grid) {
  Seed seed{Samples(grid.size(), 1.0), Samples(grid.size(), 0.0)};
  if (!q.is_zero()) {
    const auto states = integrate_ivp(q, 0.0, 1.0, 0.0, grid.points(), kMinOdeTolerance);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      seed.f[i] = states[i].u;
      seed.f_prime[i] = states[i].du;
    }
  }
  check_nonvanishing(seed.f, grid);
  return seed;
}

cplx FormalPowersTable::phi_at(std::size_t k, double x) const {
  if (k > k_max) throw DomainError("formal power order exceeds the table");
  return interpolate<cplx>(grid, phi[k], x);
}

FormalPowersTable build_formal_powers(const Grid& grid, Samples f, Samples f_prime, std::size_t k_max) {
  if (f.size() != grid.size() || f_prime.size() != grid.size())
    throw DomainError("formal powers: seed size does not match the grid");
  check_nonvanishing(f, grid);

  const std::size_t m = grid.size();
  Samples f2(m), f2inv(m);
  for (std::size_t i = 0; i < m; ++i) {
    f2[i] = f[i] * f[i];
    f2inv[i] = 1.0 / f2[i];
  }

  FormalPowersTable t{grid, {}, {}, k_max, {}, {}, {}};
  t.X.assign(k_max + 1, Samples(m, 1.0));
  t.X_tilde.assign(k_max + 1, Samples(m, 1.0));
  Samples integrand(m);
  for (std::size_t n = 1; n <= k_max; ++n) {
    const bool odd = n % 2 == 1;
    const double nn = static_cast<double>(n);
    // X^(n): weight (f^2)^{(-1)^n};  X~^(n): weight (f^2)^{(-1)^{n-1}}.
    const Samples& wx = odd ? f2inv : f2;
    const Samples& wt = odd ? f2 : f2inv;
    for (std::size_t i = 0; i < m; ++i) integrand[i] = t.X[n - 1][i] * wx[i];
    t.X[n] = antiderivative<cplx>(integrand, grid);
    for (auto& v : t.X[n]) v *= nn;
    for (std::size_t i = 0; i < m; ++i) integrand[i] = t.X_tilde[n - 1][i] * wt[i];
    t.X_tilde[n] = antiderivative<cplx>(integrand, grid);
    for (auto& v : t.X_tilde[n]) v *= nn;
  }
  t.phi.assign(k_max + 1, Samples(m));
  for (std::size_t k = 0; k <= k_max; ++k) {
    const Samples& chain = (k % 2 == 1) ? t.X[k] : t.X_tilde[k];
    for (std::size_t i = 0; i < m; ++i) t.phi[k][i] = f[i] * chain[i];
  }
  t.f = std::move(f);
  t.f_prime = std::move(f_prime);
  return t;
}

FormalPowersTable make_formal_powers(const Potential& q, Grid grid, std::size_t k_max) {
  grid.set_breaks(q.breakpoints());
  auto seed = solve_seed(q, grid);
  return build_formal_powers(grid, std::move(seed.f), std::move(seed.f_prime), k_max);
}

void write_formal_powers_csv(std::ostream& out, const FormalPowersTable& t) {
  std::vector<std::string> header{"x", "re_f", "im_f", "re_df", "im_df"};
  for (std::size_t k = 1; k <= t.k_max; ++k) {
    header.push_back("re_phi" + std::to_string(k));
    header.push_back("im_phi" + std::to_string(k));
  }
  csv::write_row(out, header);
  std::vector<std::string> row;
  for (std::size_t i = 0; i < t.grid.size(); ++i) {
    row.clear();
    row.push_back(csv::format(t.grid[i]));
    row.push_back(csv::format(t.f[i].real()));
    row.push_back(csv::format(t.f[i].imag()));
    row.push_back(csv::format(t.f_prime[i].real()));
    row.push_back(csv::format(t.f_prime[i].imag()));
    for (std::size_t k = 1; k <= t.k_max; ++k) {
      row.push_back(csv::format(t.phi[k][i].real()));
      row.push_back(csv::format(t.phi[k][i].imag()));
    }
    csv::write_row(out, row);
  }
}

FormalPowersTable read_formal_powers_csv(std::istream& in) {
  const auto table = csv::read(in);
  const std::size_t cols = table.header.size();
  if (cols < 5 || (cols - 5) % 2 != 0) throw DomainError("formal powers csv: unexpected column count");
  const std::size_t k_max = (cols - 5) / 2;
  const std::size_t rows = table.rows.size();
  if (rows < 17) throw DomainError("formal powers csv: too few rows");

  const double left = csv::to_double(table.rows.front()[0]);
  const double right = csv::to_double(table.rows.back()[0]);
  Grid grid(left, right, rows - 1);
  Samples f(rows), df(rows);
  std::vector<Samples> phi(k_max + 1, Samples(rows));
  for (std::size_t i = 0; i < rows; ++i) {
    const auto& r = table.rows[i];
    f[i] = {csv::to_double(r[1]), csv::to_double(r[2])};
    df[i] = {csv::to_double(r[3]), csv::to_double(r[4])};
    for (std::size_t k = 1; k <= k_max; ++k)
      phi[k][i] = {csv::to_double(r[3 + 2 * k]), csv::to_double(r[4 + 2 * k])};
  }
  auto t = build_formal_powers(grid, f, df, k_max);
  phi[0] = t.f;
  t.phi = std::move(phi);
  return t;
}

}  // namespace transmute
