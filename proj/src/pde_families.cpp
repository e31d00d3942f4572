#include "transmute/pde_families.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <ostream>
#include <string>

#include <boost/math/special_functions/binomial.hpp>

#include "transmute/csv.hpp"
#include "transmute/numerics.hpp"
#include "transmute/parallel.hpp"

namespace transmute {

PlanarDomain PlanarDomain::rectangle(double x0, double x1, double y0, double y1) {
  if (!(x1 > x0 && y1 > y0)) throw DomainError("rectangle needs x0 < x1 and y0 < y1");
  PlanarDomain d;
  d.x0_ = x0;
  d.x1_ = x1;
  d.y0_ = y0;
  d.y1_ = y1;
  return d;
}

PlanarDomain PlanarDomain::disk(Point c, double r) {
  if (!(r > 0.0)) throw DomainError("disk needs a positive radius");
  PlanarDomain d = rectangle(c.x - r, c.x + r, c.y - r, c.y + r);
  d.disk_ = true;
  return d;
}

Point PlanarDomain::center() const noexcept { return {0.5 * (x0_ + x1_), 0.5 * (y0_ + y1_)}; }

double PlanarDomain::circumradius() const noexcept {
  const double w = 0.5 * (x1_ - x0_), h = 0.5 * (y1_ - y0_);
  return disk_ ? w : std::hypot(w, h);
}

bool PlanarDomain::contains(Point p) const noexcept {
  if (disk_) {
    const Point c = center();
    return std::hypot(p.x - c.x, p.y - c.y) <= 0.5 * (x1_ - x0_);
  }
  return p.x >= x0_ && p.x <= x1_ && p.y >= y0_ && p.y <= y1_;
}

std::vector<Point> PlanarDomain::boundary(std::size_t count) const {
  std::vector<Point> out(count);
  if (disk_) {
    const Point c = center();
    const double r = 0.5 * (x1_ - x0_);
    for (std::size_t i = 0; i < count; ++i) {
      const double a = 2.0 * M_PI * static_cast<double>(i) / static_cast<double>(count);
      out[i] = {c.x + r * std::cos(a), c.y + r * std::sin(a)};
    }
    return out;
  }
  const double w = x1_ - x0_, h = y1_ - y0_, len = 2.0 * (w + h);
  for (std::size_t i = 0; i < count; ++i) {
    double s = len * static_cast<double>(i) / static_cast<double>(count);
    if (s < w) {
      out[i] = {x0_ + s, y0_};
    } else if ((s -= w) < h) {
      out[i] = {x1_, y0_ + s};
    } else if ((s -= h) < w) {
      out[i] = {x1_ - s, y1_};
    } else {
      out[i] = {x0_, y1_ - (s - w)};
    }
  }
  return out;
}

std::vector<Point> PlanarDomain::interior(std::size_t n) const {
  std::vector<Point> out;
  const double dx = (x1_ - x0_) / static_cast<double>(n + 1), dy = (y1_ - y0_) / static_cast<double>(n + 1);
  const Point c = center();
  const double r = 0.5 * (x1_ - x0_);
  for (std::size_t i = 1; i <= n; ++i)
    for (std::size_t j = 1; j <= n; ++j) {
      const Point p{x0_ + i * dx, y0_ + j * dy};
      if (!disk_ || std::hypot(p.x - c.x, p.y - c.y) < r * (1.0 - 1e-12)) out.push_back(p);
    }
  return out;
}

std::size_t family_degree(std::size_t m) noexcept { return m == 0 ? 0 : m % 2 ? (m + 1) / 2 : m / 2; }

namespace {

double binom(std::size_t n, std::size_t k) { return boost::math::binomial_coefficient<double>(n, k); }

// sum over k of the parity selected by m of the signed binomial terms, with
// pw(j) standing for x^j or phi_j(x)
template <class T, class Pow>
T member_sum(std::size_t m, double y, Pow pw) {
  if (m == 0) return pw(0);
  const std::size_t d = family_degree(m);
  T acc{};
  double yk = m % 2 ? 1.0 : y;
  for (std::size_t k = m % 2 ? 0 : 1; k <= d; k += 2) {
    // (-1)^{k/2} for even k, (-1)^{(k+1)/2} for odd k
    const double sign = ((k + (m % 2 ? 0 : 1)) / 2) % 2 ? -1.0 : 1.0;
    acc += sign * binom(d, k) * pw(d - k) * yk;
    yk *= y * y;
  }
  return acc;
}

void powers_at(const FormalPowersTable& t, std::size_t degree, double x, std::vector<cplx>& out) {
  out.resize(degree + 1);
  std::size_t idx;
  const bool node = t.grid.node_index(x, idx);
  for (std::size_t k = 0; k <= degree; ++k) out[k] = node ? t.phi[k][idx] : t.phi_at(k, x);
}

void check_family(const FormalPowersTable& t, std::size_t basis_size) {
  if (basis_size == 0) throw DomainError("empty basis");
  if (family_degree(basis_size - 1) > t.k_max)
    throw DomainError("basis of size " + std::to_string(basis_size) + " needs formal powers up to order " +
                      std::to_string(family_degree(basis_size - 1)));
}

void check_x_range(const Grid& g, const PlanarDomain& d) {
  if (d.x_min() < g.left() - 1e-12 || d.x_max() > g.right() + 1e-12)
    throw DomainError("domain x-extent [" + std::to_string(d.x_min()) + ", " + std::to_string(d.x_max()) +
                      "] leaves the kernel interval");
}

using Row = std::function<void(Point, std::span<cplx>)>;

// Column-scaled least squares over the boundary points; `row` fills the
// basis values at a point.
CollocationReport collocate(const std::vector<Point>& pts, std::span<const cplx> data, std::size_t cols,
                            const Row& row, const CollocationOptions& opt) {
  const std::size_t p = pts.size();
  if (p < kPointsPerBasis * cols)
    throw DomainError("collocation needs at least " + std::to_string(kPointsPerBasis) + " boundary points per basis function");
  Matrix<cplx> a(p, cols);
  parallel_for(p, [&](std::size_t i) {
    std::vector<cplx> r(cols);
    row(pts[i], r);
    for (std::size_t j = 0; j < cols; ++j) a(i, j) = r[j];
  });
  std::vector<double> scale(cols, 0.0);
  for (std::size_t j = 0; j < cols; ++j) {
    for (std::size_t i = 0; i < p; ++i) scale[j] += std::norm(a(i, j));
    scale[j] = std::sqrt(scale[j]);
    if (scale[j] == 0.0) scale[j] = 1.0;
  }
  Matrix<cplx> s = a;
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = 0; j < cols; ++j) s(i, j) /= scale[j];

  CollocationReport rep;
  LstsqResult<cplx> sol;
  try {
    sol = lstsq(s, data);
  } catch (const RankDeficient& e) {
    if (!opt.pivoted_fallback)
      throw BasisDegenerate(std::string(e.what()) + "; lower the basis size or enable the pivoted fallback");
    sol = lstsq_pivoted(s, data);
    for (const cplx& v : sol.x) rep.dropped_columns += v == 0.0;
    rep.diagnostics.warn(WarningCode::NearDegenerate, "basis is numerically dependent; pivoted QR dropped " +
                                                          std::to_string(rep.dropped_columns) + " columns");
  }
  rep.condition_estimate = sol.condition_estimate;
  rep.coefficients.resize(cols);
  for (std::size_t j = 0; j < cols; ++j) rep.coefficients[j] = sol.x[j] / scale[j];
  for (std::size_t i = 0; i < p; ++i) {
    cplx v = 0.0;
    for (std::size_t j = 0; j < cols; ++j) v += a(i, j) * rep.coefficients[j];
    rep.boundary_residual = std::max(rep.boundary_residual, std::abs(v - data[i]));
  }
  return rep;
}

std::vector<cplx> sample(const Field& f, const std::vector<Point>& pts) {
  std::vector<cplx> v(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) v[i] = f(pts[i].x, pts[i].y);
  return v;
}

}  // namespace

double harmonic_polynomial(std::size_t m, double x, double y) {
  return member_sum<double>(m, y, [x](std::size_t j) { return std::pow(x, static_cast<double>(j)); });
}

cplx family_member(const FormalPowersTable& powers, std::size_t m, double x, double y) {
  const std::size_t d = family_degree(m);
  if (d > powers.k_max) throw DomainError("family member " + std::to_string(m) + " needs phi_" + std::to_string(d));
  std::vector<cplx> phi;
  powers_at(powers, d, x, phi);
  return member_sum<cplx>(m, y, [&](std::size_t j) { return phi[j]; });
}

CollocationReport solve_dirichlet(const FormalPowersTable& powers, const PlanarDomain& domain,
                                  std::span<const cplx> data, std::size_t basis_size, CollocationOptions options) {
  check_family(powers, basis_size);
  check_x_range(powers.grid, domain);
  const auto pts = domain.boundary(data.size());
  const std::size_t top = family_degree(basis_size - 1);
  const Row row = [&](Point p, std::span<cplx> r) {
    std::vector<cplx> phi;
    powers_at(powers, top, p.x, phi);
    for (std::size_t m = 0; m < basis_size; ++m)
      r[m] = member_sum<cplx>(m, p.y, [&](std::size_t j) { return phi[j]; });
  };
  auto rep = collocate(pts, data, basis_size, row, options);
  auto table = std::make_shared<const FormalPowersTable>(powers);
  rep.evaluate = [table, c = rep.coefficients, top](double x, double y) {
    std::vector<cplx> phi;
    powers_at(*table, top, x, phi);
    cplx v = 0.0;
    for (std::size_t m = 0; m < c.size(); ++m)
      if (c[m] != 0.0) v += c[m] * member_sum<cplx>(m, y, [&](std::size_t j) { return phi[j]; });
    return v;
  };
  return rep;
}

CollocationReport solve_dirichlet(const FormalPowersTable& powers, const PlanarDomain& domain, const Field& data,
                                  std::size_t basis_size, CollocationOptions options) {
  const auto v = sample(data, domain.boundary(kPointsPerBasis * basis_size));
  return solve_dirichlet(powers, domain, v, basis_size, options);
}

cplx mfs_image(const LegendreKernel& kern, cplx source, double x, double y) {
  const cplx shifted = source - cplx(0.0, y);
  const double plain = std::log(std::abs(cplx(x, 0.0) - shifted));
  if (x == 0.0) {
    if (shifted == 0.0) throw DomainError("mfs_image: evaluation point on the source");
    return plain;
  }
  const cplx z = shifted / x;
  if (on_legendre_cut(z)) throw DomainError("mfs_image: Z - iy lies on the segment [-|x|, |x|]");
  const std::size_t n1 = kern.order + 1;
  std::vector<cplx> b(n1);
  kern.betas_at(x, b);
  const auto q = legendre_q_all(n1, z);
  cplx acc = b[0] * (std::log(std::abs(shifted + x)) + std::log(std::abs(shifted - x)) + 2.0 * q[1].real());
  for (std::size_t n = 1; n < n1; ++n) acc += 2.0 * b[n] / (2.0 * n + 1.0) * (q[n + 1] - q[n - 1]).real();
  return plain + acc;
}

std::vector<cplx> source_circle(const PlanarDomain& domain, std::size_t count, double factor) {
  const Point c = domain.center();
  const double r = factor * domain.circumradius();
  std::vector<cplx> z(count);
  for (std::size_t j = 0; j < count; ++j) z[j] = cplx(c.x, c.y) + std::polar(r, 2.0 * M_PI * j / static_cast<double>(count));
  return z;
}

CollocationReport mfs_solve(const LegendreKernel& kern, const PlanarDomain& domain, std::span<const cplx> data,
                            std::span<const cplx> sources, MfsOptions options) {
  if (sources.empty()) throw DomainError("mfs_solve: no sources");
  check_x_range(kern.grid, domain);
  const auto pts = domain.boundary(data.size());
  for (const cplx& z : sources)
    if (domain.contains({z.real(), z.imag()})) throw DomainError("mfs_solve: a source lies in the domain");
  const std::size_t cols = sources.size() + (options.constant_term ? 1 : 0);
  auto owned = std::make_shared<const LegendreKernel>(kern);
  std::vector<cplx> src(sources.begin(), sources.end());
  const bool constant = options.constant_term;
  const auto image_row = [owned, src, constant](double x, double y, std::span<cplx> r) {
    for (std::size_t j = 0; j < src.size(); ++j) r[j] = mfs_image(*owned, src[j], x, y);
    // T[1] = 1 + int K = 1 + 2 beta_0 = f
    if (constant) r[src.size()] = 1.0 + 2.0 * owned->beta_at(0, x);
  };
  auto rep = collocate(pts, data, cols, [&](Point p, std::span<cplx> r) { image_row(p.x, p.y, r); }, options);
  rep.evaluate = [image_row, c = rep.coefficients](double x, double y) {
    std::vector<cplx> r(c.size());
    image_row(x, y, r);
    cplx v = 0.0;
    for (std::size_t j = 0; j < c.size(); ++j) v += c[j] * r[j];
    return v;
  };
  return rep;
}

CollocationReport mfs_solve(const LegendreKernel& kern, const PlanarDomain& domain, const Field& data,
                            std::span<const cplx> sources, MfsOptions options) {
  const std::size_t cols = sources.size() + (options.constant_term ? 1 : 0);
  const auto v = sample(data, domain.boundary(kPointsPerBasis * cols));
  return mfs_solve(kern, domain, v, sources, options);
}

void write_field_csv(std::ostream& out, const PlanarDomain& domain, const Field& field, std::size_t n) {
  csv::write_row(out, {"x", "y", "u_re", "u_im"});
  const double x0 = domain.x_min(), x1 = domain.x_max(), y0 = domain.y_min(), y1 = domain.y_max();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const double d = n > 1 ? static_cast<double>(n - 1) : 1.0;
      const Point p{x0 + (x1 - x0) * i / d, y0 + (y1 - y0) * j / d};
      if (!domain.contains(p)) continue;
      const cplx v = field(p.x, p.y);
      csv::write_row(out, {csv::format(p.x), csv::format(p.y), csv::format(v.real()), csv::format(v.imag())});
    }
}

}  // namespace transmute
