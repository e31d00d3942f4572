#include "transmute/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>

#include "transmute/csv.hpp"
#include "transmute/numerics.hpp"
#include "transmute/ode.hpp"
#include "transmute/parallel.hpp"

namespace transmute {

double SpectralProblem::density() const noexcept {
  if (scan_density > 0.0) return scan_density;
  return std::max(kDefaultScanDensity, kScanOversampling * b / M_PI);
}

namespace {

// cosine- and sine-type solutions: (1, 0) and (0, 1) initial data
struct Basis {
  double c, s;
};

Basis basis_real(const LegendreKernel& k, double w, double x) {
  const cplx u = solve_u_nsbf(k, w, x);
  return {u.real(), u.imag() / w};
}

// u(i kappa) carries data (1, -kappa), u(-i kappa) carries (1, kappa)
Basis basis_imag(const LegendreKernel& k, double kappa, double x) {
  const cplx up = solve_u_nsbf(k, cplx(0.0, kappa), x), um = solve_u_nsbf(k, cplx(0.0, -kappa), x);
  return {0.5 * (up + um).real(), (um - up).real() / (2.0 * kappa)};
}

struct Setup {
  std::size_t first = 0, end = 0;  // node indices of 0 and b
  double h = 0.0;
};

Setup validate(const SpectralProblem& p, const LegendreKernel& k) {
  if (!(p.b > 0.0) || !std::isfinite(p.b)) throw DomainError("spectral problem needs b > 0");
  if (p.left.alpha == 0.0 && p.left.beta == 0.0) throw DomainError("left boundary condition is (0, 0)");
  if (p.right.alpha == 0.0 && p.right.beta == 0.0) throw DomainError("right boundary condition is (0, 0)");
  if (!p.q.is_real()) throw DomainError("eigenvalue search needs a real potential");
  Setup s;
  if (!k.grid.node_index(p.b, s.end) || k.grid.left() > 0.0)
    throw DomainError("b must be a node of a kernel grid containing [0, b]");
  s.first = k.grid.zero_index();
  s.h = k.grid.step();
  if (p.right.beta != 0.0 && s.end < s.first + 4) throw DomainError("Robin condition needs 5 nodes in [0, b]");
  return s;
}

struct Endpoint {
  double phi = 0.0;
  double fd_error = 0.0;
};

template <class B>
Endpoint endpoint(const SpectralProblem& p, const LegendreKernel& k, const Setup& s, B basis) {
  const auto y_at = [&](std::size_t i) {
    const Basis v = basis(k.grid[i]);
    return p.left.alpha * v.s - p.left.beta * v.c;
  };
  Endpoint e;
  const double y = y_at(s.end);
  double dy = 0.0;
  if (p.right.beta != 0.0) {
    double f[5] = {y};
    for (std::size_t j = 1; j < 5; ++j) f[j] = y_at(s.end - j);
    dy = (25.0 * f[0] - 48.0 * f[1] + 36.0 * f[2] - 16.0 * f[3] + 3.0 * f[4]) / (12.0 * s.h);
    // the 4-point formula is one order lower; their gap overestimates the error
    const double d4 = (11.0 * f[0] - 18.0 * f[1] + 9.0 * f[2] - 2.0 * f[3]) / (6.0 * s.h);
    e.fd_error = std::abs(dy - d4);
  }
  e.phi = p.right.alpha * y + p.right.beta * dy;
  return e;
}

struct Axis {
  const SpectralProblem& p;
  const LegendreKernel& k;
  Setup s;
  bool imag;  // scanning w = i kappa

  Endpoint at(double t) const {
    if (imag) return endpoint(p, k, s, [&](double x) { return basis_imag(k, t, x); });
    return endpoint(p, k, s, [&](double x) { return basis_real(k, t, x); });
  }
  double phi(double t) const {
    const double v = at(t).phi;
    if (!std::isfinite(v)) throw DomainError("characteristic function is not finite at " + std::to_string(t));
    return v;
  }
  cplx omega(double t) const { return imag ? cplx(0.0, t) : cplx(t); }
};

struct Bracket {
  double lo, hi, flo, fhi;
};

class Scanner {
 public:
  Scanner(const Axis& axis, double step) : axis_(axis), step_(step) {}

  // Appends brackets found on [lo, hi]; a zero exactly at hi is left to the
  // next call unless `closed`.
  void run(double lo, double hi, bool closed, std::vector<Bracket>& out) {
    const std::size_t n = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil((hi - lo) / step_ - 1e-9)));
    std::vector<double> t(n + 1), v(n + 1);
    for (std::size_t i = 0; i <= n; ++i) t[i] = i == n ? hi : lo + static_cast<double>(i) * step_;
    parallel_for(n + 1, [&](std::size_t i) { v[i] = axis_.phi(t[i]); });
    for (std::size_t i = 0; i <= n; ++i) {
      if (v[i] == 0.0 && (i < n || closed))
        push({t[i], t[i], 0.0, 0.0}, out);
      else if (i < n && v[i] != 0.0 && v[i + 1] != 0.0 && (v[i] < 0.0) != (v[i + 1] < 0.0))
        push({t[i], t[i + 1], v[i], v[i + 1]}, out);
    }
  }

 private:
  void push(const Bracket& b, std::vector<Bracket>& out) {
    if (have_last_ && b.lo - last_ < (static_cast<double>(kMinBracketSteps) - 0.5) * step_)
      throw ScanTooCoarse("sign changes at " + std::to_string(last_) + " and " + std::to_string(b.lo) +
                          " are closer than " + std::to_string(kMinBracketSteps) +
                          " scan steps; raise the scan density");
    last_ = b.lo;
    have_last_ = true;
    out.push_back(b);
  }

  const Axis& axis_;
  double step_;
  double last_ = 0.0;
  bool have_last_ = false;
};

double refine(const Axis& axis, Bracket br) {
  if (br.lo == br.hi) return br.lo;
  double a = br.lo, b = br.hi, fa = br.flo, fb = br.fhi;
  while (b - a > kRootTolerance * std::max(1.0, std::abs(b))) {
    const double m = 0.5 * (a + b);
    if (m <= a || m >= b) break;
    const double fm = axis.phi(m);
    if (fm == 0.0) return m;
    if ((fm < 0.0) == (fa < 0.0)) {
      a = m;
      fa = fm;
    } else {
      b = m;
      fb = fm;
    }
  }
  // secant polish inside the final bracket
  const double s = b - fb * (b - a) / (fb - fa);
  return s >= a && s <= b ? s : 0.5 * (a + b);
}

std::vector<double> samples(const Axis& axis, double t) {
  std::vector<double> y(axis.s.end - axis.s.first + 1);
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double x = axis.k.grid[axis.s.first + i];
    const Basis v = i == 0 ? Basis{1.0, 0.0} : axis.imag ? basis_imag(axis.k, t, x) : basis_real(axis.k, t, x);
    y[i] = axis.p.left.alpha * v.s - axis.p.left.beta * v.c;
  }
  return y;
}

std::size_t sign_changes(const std::vector<double>& y) {
  std::size_t n = 0;
  double prev = 0.0;
  for (std::size_t i = 1; i + 1 < y.size(); ++i) {
    if (y[i] == 0.0) continue;
    if (prev != 0.0 && (prev < 0.0) != (y[i] < 0.0)) ++n;
    prev = y[i];
  }
  return n;
}

std::vector<double> normalised(std::vector<double> y, const Setup& s, double b) {
  const Grid g(0.0, b, s.end - s.first);
  std::vector<double> sq(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) sq[i] = y[i] * y[i];
  const double norm = std::sqrt(integrate<double>(sq, g));
  for (auto& v : y) v /= norm;
  return y;
}

Eigenpair finish(const Axis& axis, double t, const EigenOptions& opt) {
  const SpectralProblem& p = axis.p;
  Eigenpair e;
  e.omega = axis.omega(t);
  e.lambda = (axis.imag ? -t * t : t * t) - p.shift;
  const double d = std::min(1e-5 * std::max(1.0, t), 0.5 * t);
  const double slope = std::abs(axis.phi(t + d) - axis.phi(t - d)) / (2.0 * d);

  const Endpoint ep = axis.at(t);
  const double eu = tail_estimate(axis.k, p.b).eps_hat * plane_wave_norm(e.omega, p.b);
  const double yerr = std::abs(p.left.alpha) * eu / t + std::abs(p.left.beta) * eu;
  const double dyerr = ep.fd_error + t * yerr;
  e.certificate = (std::abs(p.right.alpha) * yerr + std::abs(p.right.beta) * dyerr) / slope;

  if (opt.residuals) {
    const double xs[] = {p.b};
    const auto st = integrate_ivp(p.q, std::sqrt(cplx(e.lambda)), -p.left.beta, p.left.alpha, xs, kMinOdeTolerance);
    e.residual = std::abs(p.right.alpha * st[0].u.real() + p.right.beta * st[0].du.real()) / slope;
  }
  if (opt.eigenfunctions) e.eigenfunction = normalised(samples(axis, t), axis.s, p.b);
  return e;
}

std::vector<double> roots(const Axis& axis, const std::vector<Bracket>& br, Diagnostics& diag) {
  std::vector<double> r(br.size());
  parallel_for(br.size(), [&](std::size_t i) { r[i] = refine(axis, br[i]); });
  std::sort(r.begin(), r.end());
  std::vector<double> out;
  for (double v : r) {
    if (!out.empty() && v - out.back() < kNearDegenerateSpacing) {
      diag.warn(WarningCode::NearDegenerate, "roots at " + std::to_string(out.back()) + " and " + std::to_string(v) +
                                                 " merged (spacing below 1e-8)");
      continue;
    }
    out.push_back(v);
  }
  return out;
}

std::vector<Eigenpair> finish_all(const Axis& axis, const std::vector<double>& r, const EigenOptions& opt) {
  std::vector<Eigenpair> out(r.size());
  parallel_for(r.size(), [&](std::size_t i) { out[i] = finish(axis, r[i], opt); });
  return out;
}

double min_q(const SpectralProblem& p, const LegendreKernel& k, const Setup& s) {
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t i = s.first; i <= s.end; ++i) m = std::min(m, p.q(k.grid[i]).real() + p.shift);
  return m;
}

// lambda_1 >= min q for Dirichlet ends; a Robin end y'/y = -a/b adds roughly
// |a/b| to the decay rate a bound state can have
double kappa_limit(const SpectralProblem& p, double qmin) {
  double c = std::sqrt(std::max(0.0, -qmin));
  double robin = 0.0;
  if (p.left.beta != 0.0) robin = std::max(robin, std::abs(p.left.alpha / p.left.beta));
  if (p.right.beta != 0.0) robin = std::max(robin, std::abs(p.right.alpha / p.right.beta));
  if (robin > 0.0) c += robin + 1.0;
  return c;
}

constexpr double kScanStart = 1e-6;

// lambda = 0 is a double root in w on both axes, but the characteristic is
// analytic in lambda and changes sign across it: compare Phi at w = s and
// w = i s, i.e. lambda = s^2 and -s^2
bool zero_mode(const Axis& real_axis, const Axis& imag_axis) {
  const double fr = real_axis.phi(kScanStart), fi = imag_axis.phi(kScanStart);
  return fr != 0.0 && fi != 0.0 && (fr < 0.0) != (fi < 0.0);
}

Eigenpair finish_zero(const Axis& real_axis, const Axis& imag_axis, const EigenOptions& opt) {
  const SpectralProblem& p = real_axis.p;
  Eigenpair e;
  e.omega = 0.0;
  e.lambda = -p.shift;
  e.certificate = kScanStart;
  if (opt.residuals) {
    const double xs[] = {p.b};
    const auto st = integrate_ivp(p.q, std::sqrt(cplx(e.lambda)), -p.left.beta, p.left.alpha, xs, kMinOdeTolerance);
    const double dfdl = std::abs(real_axis.phi(kScanStart) - imag_axis.phi(kScanStart)) / (2.0 * kScanStart * kScanStart);
    e.residual = std::sqrt(std::abs(p.right.alpha * st[0].u.real() + p.right.beta * st[0].du.real()) / dfdl);
  }
  if (opt.eigenfunctions) e.eigenfunction = normalised(samples(real_axis, kScanStart), real_axis.s, p.b);
  return e;
}

}  // namespace

double characteristic(const SpectralProblem& problem, const LegendreKernel& kern, double omega) {
  if (!(omega > 0.0)) throw DomainError("characteristic needs w > 0");
  return Axis{problem, kern, validate(problem, kern), false}.phi(omega);
}

double characteristic_imag(const SpectralProblem& problem, const LegendreKernel& kern, double kappa) {
  if (!(kappa > 0.0)) throw DomainError("characteristic_imag needs kappa > 0");
  return Axis{problem, kern, validate(problem, kern), true}.phi(kappa);
}

EigenResult find_eigenvalues(const SpectralProblem& problem, const LegendreKernel& kern, std::size_t count,
                             EigenOptions options) {
  const Setup s = validate(problem, kern);
  const double step = 1.0 / problem.density();
  EigenResult res;
  if (count == 0) return res;

  if (options.bound_states) {
    const double c = kappa_limit(problem, min_q(problem, kern, s));
    if (c > 0.0) {
      const Axis axis{problem, kern, s, true};
      if (tail_estimate(kern, problem.b).strip_bound(c) > kStripTolerance)
        res.diagnostics.warn(WarningCode::Magnitude, "bound-state scan up to kappa = " + std::to_string(c) +
                                                         " exceeds the strip tolerance");
      std::vector<Bracket> br;
      Scanner(axis, step).run(kScanStart, c + 2.0 * step, true, br);
      auto bound = finish_all(axis, roots(axis, br, res.diagnostics), options);
      std::reverse(bound.begin(), bound.end());  // largest kappa is the lowest lambda
      res.pairs = std::move(bound);
    }
    const Axis re{problem, kern, s, false}, im{problem, kern, s, true};
    if (zero_mode(re, im)) res.pairs.push_back(finish_zero(re, im, options));
  }

  const Axis axis{problem, kern, s, false};
  Scanner scanner(axis, step);
  std::vector<Bracket> br;
  const double width = std::max(10.0, M_PI / problem.b * 4.0);
  const double give_up = 10.0 * (static_cast<double>(count) + 10.0) * M_PI / problem.b + 1e3;
  std::vector<double> found;
  Diagnostics merged;
  for (double lo = kScanStart; res.pairs.size() + found.size() < count; lo += width) {
    if (lo > give_up) throw DomainError("eigenvalue scan passed w = " + std::to_string(lo) + " without enough roots");
    scanner.run(lo, lo + width, false, br);
    // refine only once enough brackets are in; merged roots send us back
    if (res.pairs.size() + br.size() < count) continue;
    merged = Diagnostics();
    found = roots(axis, br, merged);
  }
  res.diagnostics.merge(merged);
  found.resize(count - res.pairs.size());
  for (auto& e : finish_all(axis, found, options)) res.pairs.push_back(std::move(e));
  for (std::size_t i = 0; i < res.pairs.size(); ++i) res.pairs[i].index = i + 1;
  return res;
}

EigenResult find_eigenvalues_in_range(const SpectralProblem& problem, const LegendreKernel& kern,
                                      EigenOptions options) {
  const Setup s = validate(problem, kern);
  if (!(problem.omega_min >= 0.0 && problem.omega_max > problem.omega_min))
    throw DomainError("omega range needs 0 <= omega_min < omega_max");
  EigenResult res;
  const Axis axis{problem, kern, s, false};
  std::vector<Bracket> br;
  Scanner(axis, 1.0 / problem.density()).run(std::max(problem.omega_min, kScanStart), problem.omega_max, true, br);
  res.pairs = finish_all(axis, roots(axis, br, res.diagnostics), options);
  parallel_for(res.pairs.size(), [&](std::size_t i) {
    res.pairs[i].index = sign_changes(samples(axis, res.pairs[i].omega.real())) + 1;
  });
  return res;
}

std::vector<double> eigenfunction(const SpectralProblem& problem, const LegendreKernel& kern, const Eigenpair& pair) {
  const Setup s = validate(problem, kern);
  const bool imag = pair.omega.imag() != 0.0;
  const Axis axis{problem, kern, s, imag};
  const double t = imag ? pair.omega.imag() : std::max(pair.omega.real(), kScanStart);
  return normalised(samples(axis, t), s, problem.b);
}

std::vector<double> eigenfunction_nodes(const SpectralProblem& problem, const LegendreKernel& kern) {
  const Setup s = validate(problem, kern);
  std::vector<double> x(s.end - s.first + 1);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = kern.grid[s.first + i];
  return x;
}

void write_eigen_csv(std::ostream& out, std::span<const Eigenpair> pairs) {
  csv::write_row(out, {"n", "omega_re", "omega_im", "lambda", "residual", "certificate"});
  for (const auto& e : pairs)
    csv::write_row(out, {std::to_string(e.index), csv::format(e.omega.real()), csv::format(e.omega.imag()),
                         csv::format(e.lambda), csv::format(e.residual), csv::format(e.certificate)});
}

void write_eigenfunction_csv(std::ostream& out, std::span<const double> nodes, std::span<const Eigenpair> pairs) {
  std::vector<std::string> row{"x"};
  std::vector<const Eigenpair*> cols;
  for (const auto& e : pairs)
    if (e.eigenfunction.size() == nodes.size()) {
      row.push_back("y_" + std::to_string(e.index));
      cols.push_back(&e);
    }
  csv::write_row(out, row);
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    row.assign(1, csv::format(nodes[i]));
    for (const auto* e : cols) row.push_back(csv::format(e->eigenfunction[i]));
    csv::write_row(out, row);
  }
}

}  // namespace transmute
