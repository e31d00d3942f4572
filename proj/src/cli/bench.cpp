#include "transmute/cli/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <ostream>

#include <boost/math/tools/roots.hpp>

#include "transmute/csv.hpp"
#include "transmute/kernel_legendre.hpp"
#include "transmute/ode.hpp"
#include "transmute/spectral.hpp"

namespace transmute::cli {

namespace {

using clock_type = std::chrono::steady_clock;

double seconds_since(clock_type::time_point t0) {
  return std::chrono::duration<double>(clock_type::now() - t0).count();
}

// best of `repeats` timings of f
template <class F>
double best_time(std::size_t repeats, F f) {
  double best = 1e300;
  for (std::size_t r = 0; r < repeats; ++r) {
    const auto t0 = clock_type::now();
    f();
    best = std::min(best, seconds_since(t0));
  }
  return best;
}

// per-call time of f, looping until the measurement is long enough to trust
template <class F>
double per_call(std::size_t repeats, std::size_t calls_per_loop, F f) {
  std::size_t loops = 1;
  for (;;) {
    const auto t0 = clock_type::now();
    for (std::size_t i = 0; i < loops; ++i) f();
    if (seconds_since(t0) > 5e-3 || loops > (1u << 20)) break;
    loops *= 4;
  }
  return best_time(repeats, [&] {
           for (std::size_t i = 0; i < loops; ++i) f();
         }) /
         static_cast<double>(loops * calls_per_loop);
}

LegendreKernel build(const Potential& q, double b, std::size_t m, std::size_t n) {
  // the beta recurrence needs phi_1 only
  return build_beta(make_formal_powers(q, Grid::half(b, m), 1), n);
}

struct Reference {
  const Potential& q;
  std::optional<double> c;
  double b;

  std::vector<cplx> u(double omega, std::span<const double> xs) const {
    std::vector<cplx> out(xs.size());
    if (c) {
      const cplx big = std::sqrt(cplx(omega * omega - *c));
      for (std::size_t i = 0; i < xs.size(); ++i)
        out[i] = std::abs(big) < 1e-12 ? cplx(1.0, omega * xs[i])
                                       : std::cos(big * xs[i]) + cplx(0, omega) * std::sin(big * xs[i]) / big;
      return out;
    }
    const auto st = ode_oracle(q, omega, xs);
    for (std::size_t i = 0; i < xs.size(); ++i) out[i] = st[i].u;
    return out;
  }

  // Dirichlet y(b) as a function of w
  double dirichlet(double omega) const {
    const double xs[] = {b};
    return integrate_ivp(q, omega, 0.0, 1.0, xs, kMinOdeTolerance)[0].u.real();
  }
};

double polish(const std::function<double(double)>& f, double lo, double hi) {
  double flo = f(lo), fhi = f(hi);
  if (!(flo * fhi <= 0.0)) return std::nan("");
  boost::uintmax_t iters = 200;
  const auto r = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, boost::math::tools::eps_tolerance<double>(50), iters);
  return 0.5 * (r.first + r.second);
}

}  // namespace

std::vector<cplx> rk4_fixed(const Potential& q, cplx omega, cplx y0, cplx dy0, double b, std::size_t steps) {
  const double h = b / static_cast<double>(steps);
  const cplx w2 = omega * omega;
  std::vector<cplx> out(steps + 1);
  cplx y = y0, dy = dy0;
  out[0] = y;
  for (std::size_t i = 0; i < steps; ++i) {
    const double x = h * static_cast<double>(i);
    const cplx c0 = q(x) - w2, c1 = q(x + 0.5 * h) - w2, c2 = q(x + h) - w2;
    const cplx k1y = dy, k1d = c0 * y;
    const cplx k2y = dy + 0.5 * h * k1d, k2d = c1 * (y + 0.5 * h * k1y);
    const cplx k3y = dy + 0.5 * h * k2d, k3d = c1 * (y + 0.5 * h * k2y);
    const cplx k4y = dy + h * k3d, k4d = c2 * (y + h * k3y);
    y += h / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y);
    dy += h / 6.0 * (k1d + 2.0 * k2d + 2.0 * k3d + k4d);
    out[i + 1] = y;
  }
  return out;
}

BenchReport run_bench(const JobConfig& config, const Potential& q, std::optional<double> constant) {
  const auto& s = config.bench;
  const double b = config.b;
  BenchReport rep;
  const Reference ref{q, constant, b};

  // x grid shared by NSBF and the fixed-step baseline (whose nodes it hits)
  const std::size_t gaps = s.x_points - 1;
  std::size_t steps = s.shooting_steps ? s.shooting_steps : config.M;
  steps = (steps + gaps - 1) / gaps * gaps;
  std::vector<double> xs(s.x_points);
  for (std::size_t i = 0; i < s.x_points; ++i) xs[i] = b * static_cast<double>(i) / static_cast<double>(gaps);
  std::vector<std::vector<cplx>> exact;
  for (double w : s.omega) exact.push_back(ref.u(w, xs));

  for (const std::size_t n : s.orders) {
    BenchReport::Order row{n, 0, 0, 0};
    std::optional<LegendreKernel> built;
    row.build_seconds = best_time(s.repeats, [&] { built = build(q, b, config.M, n); });
    const LegendreKernel& k = *built;
    double total = 0;
    for (std::size_t j = 0; j < s.omega.size(); ++j) {
      for (std::size_t i = 0; i < xs.size(); ++i)
        row.max_error = std::max(row.max_error, std::abs(solve_u_nsbf(k, s.omega[j], xs[i]) - exact[j][i]));
      total += per_call(s.repeats, xs.size(), [&] {
        for (double x : xs) (void)solve_u_nsbf(k, s.omega[j], x);
      });
    }
    row.eval_seconds = s.omega.empty() ? 0.0 : total / static_cast<double>(s.omega.size());
    rep.orders.push_back(row);
  }

  const auto kern = build(q, b, config.M, config.N);
  for (std::size_t j = 0; j < s.omega.size(); ++j) {
    const double w = s.omega[j];
    BenchReport::Omega row{w, 0, 0, 0, 0};
    const auto rk = rk4_fixed(q, w, 1.0, cplx(0, w), b, steps);
    for (std::size_t i = 0; i < xs.size(); ++i) {
      row.nsbf_error = std::max(row.nsbf_error, std::abs(solve_u_nsbf(kern, w, xs[i]) - exact[j][i]));
      row.shooting_error = std::max(row.shooting_error, std::abs(rk[i * (steps / gaps)] - exact[j][i]));
    }
    row.nsbf_seconds = per_call(s.repeats, xs.size(), [&] {
      for (double x : xs) (void)solve_u_nsbf(kern, w, x);
    });
    // the baseline has to march all the way; charge it per output point
    row.shooting_seconds = per_call(s.repeats, xs.size(), [&] { (void)rk4_fixed(q, w, 1.0, cplx(0, w), b, steps); });
    rep.omegas.push_back(row);
  }
  if (rep.omegas.size() >= 2) {
    const auto lo = std::min_element(rep.omegas.begin(), rep.omegas.end(), [](auto& a, auto& c) { return a.omega < c.omega; });
    const auto hi = std::max_element(rep.omegas.begin(), rep.omegas.end(), [](auto& a, auto& c) { return a.omega < c.omega; });
    rep.eval_ratio = hi->nsbf_seconds / lo->nsbf_seconds;
  }

  for (const std::size_t m : s.grid_sizes)
    rep.grids.push_back({m, best_time(s.repeats, [&] { (void)build(q, b, m, config.N); })});
  if (rep.grids.size() >= 2) rep.build_ratio = rep.grids.back().build_seconds / rep.grids.front().build_seconds;

  if (s.eigen_count > 0) {
    SpectralProblem prob;
    prob.q = q;
    prob.b = b;
    EigenOptions opt;
    opt.residuals = false;
    const auto found = find_eigenvalues(prob, kern, s.eigen_count, opt);
    const double spacing = std::numbers::pi / b;
    for (const auto& p : found.pairs) {
      if (p.omega.imag() != 0.0) continue;
      const double w = p.omega.real();
      double exact_w;
      if (constant) {
        const double lam = std::pow(static_cast<double>(p.index) * spacing, 2) + *constant;
        exact_w = lam >= 0 ? std::sqrt(lam) : std::nan("");
      } else {
        exact_w = polish([&](double v) { return ref.dirichlet(v); }, std::max(1e-9, w - 0.3 * spacing), w + 0.3 * spacing);
      }
      const double shot = polish(
          [&](double v) { return rk4_fixed(q, v, 0.0, 1.0, b, steps).back().real(); },
          std::max(1e-9, w - 0.3 * spacing), w + 0.3 * spacing);
      rep.eigen.push_back({p.index, exact_w, std::abs(w - exact_w), std::abs(shot - exact_w)});
    }
  }
  return rep;
}

void write_bench_orders_csv(std::ostream& out, const BenchReport& r) {
  csv::write_row(out, {"N", "build_seconds", "eval_seconds", "max_error"});
  for (const auto& o : r.orders)
    csv::write_row(out, {std::to_string(o.N), csv::format(o.build_seconds), csv::format(o.eval_seconds), csv::format(o.max_error)});
}

void write_bench_omega_csv(std::ostream& out, const BenchReport& r) {
  csv::write_row(out, {"omega", "nsbf_error", "shooting_error", "nsbf_seconds", "shooting_seconds"});
  for (const auto& o : r.omegas)
    csv::write_row(out, {csv::format(o.omega), csv::format(o.nsbf_error), csv::format(o.shooting_error),
                         csv::format(o.nsbf_seconds), csv::format(o.shooting_seconds)});
}

void write_bench_grid_csv(std::ostream& out, const BenchReport& r) {
  csv::write_row(out, {"M", "build_seconds"});
  for (const auto& g : r.grids) csv::write_row(out, {std::to_string(g.M), csv::format(g.build_seconds)});
}

void write_bench_eigen_csv(std::ostream& out, const BenchReport& r) {
  csv::write_row(out, {"n", "omega_reference", "nsbf_error", "shooting_error"});
  for (const auto& e : r.eigen)
    csv::write_row(out, {std::to_string(e.n), csv::format(e.reference), csv::format(e.nsbf_error), csv::format(e.shooting_error)});
}

void print_bench_summary(std::ostream& out, const BenchReport& r) {
  const auto flags = out.flags();
  out << std::scientific << std::setprecision(2);
  out << "order    build[s]   eval[s]    max error\n";
  for (const auto& o : r.orders)
    out << std::setw(5) << o.N << "  " << o.build_seconds << "  " << o.eval_seconds << "  " << o.max_error << '\n';
  out << "\nomega      NSBF error  RK4 error   NSBF[s/pt]  RK4[s/pt]\n";
  for (const auto& o : r.omegas)
    out << o.omega << "  " << o.nsbf_error << "    " << o.shooting_error << "    " << o.nsbf_seconds << "    "
        << o.shooting_seconds << '\n';
  out << "\ngrid     build[s]\n";
  for (const auto& g : r.grids) out << std::setw(5) << g.M << "    " << g.build_seconds << '\n';
  if (!r.eigen.empty()) {
    out << "\n    n  NSBF error  RK4 error\n";
    for (const auto& e : r.eigen) {
      if (e.n % 5 && e.n != 1) continue;
      out << std::setw(5) << e.n << "  " << e.nsbf_error << "    " << e.shooting_error << '\n';
    }
  }
  out << std::fixed << std::setprecision(3) << "\neval time ratio (largest / smallest omega): " << r.eval_ratio
      << "\nbuild time ratio (last / first grid): " << r.build_ratio << '\n';
  out.flags(flags);
}

}  // namespace transmute::cli
