#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "transmute/errors.hpp"
#include "transmute/formal_powers.hpp"
#include "transmute/kernel_legendre.hpp"

namespace transmute {

/// Boundary points per basis function required by the collocation solvers.
inline constexpr std::size_t kPointsPerBasis = 4;
/// Default MFS source circle radius relative to the domain circumradius.
inline constexpr double kSourceRadiusFactor = 1.5;

struct Point {
  double x = 0.0, y = 0.0;
};

/// Rectangle [x0, x1] x [y0, y1] or disk; boundary points are spaced
/// uniformly in arc length, counter-clockwise.
class PlanarDomain {
 public:
  static PlanarDomain rectangle(double x0, double x1, double y0, double y1);
  static PlanarDomain disk(Point center, double radius);

  std::vector<Point> boundary(std::size_t count) const;
  /// Points strictly inside, on an n x n lattice clipped to the shape.
  std::vector<Point> interior(std::size_t n) const;
  bool contains(Point p) const noexcept;
  double x_min() const noexcept { return x0_; }
  double x_max() const noexcept { return x1_; }
  double y_min() const noexcept { return y0_; }
  double y_max() const noexcept { return y1_; }
  Point center() const noexcept;
  double circumradius() const noexcept;

 private:
  bool disk_ = false;
  double x0_ = 0, x1_ = 0, y0_ = 0, y1_ = 0;  // bounding box
};

/// Member m of the complete system of solutions of (Delta - q(x)) u = 0:
/// u_0 = f, u_{2m+1} = T[Re z^{m+1}], u_{2m} = T[Re(i z^m)] = -T[Im z^m].
/// Needs phi up to degree family_degree(m).
cplx family_member(const FormalPowersTable& powers, std::size_t m, double x, double y);
std::size_t family_degree(std::size_t m) noexcept;
/// The harmonic polynomial p_m that u_m reduces to for q = 0.
double harmonic_polynomial(std::size_t m, double x, double y);

using Field = std::function<cplx(double, double)>;

struct CollocationReport {
  std::vector<cplx> coefficients;
  double boundary_residual = 0.0;  // max over the collocation points
  double condition_estimate = 0.0;
  std::size_t dropped_columns = 0;  // pivoted fallback only
  Diagnostics diagnostics;
  Field evaluate;  // the fitted solution anywhere inside the domain; owns its data
};

struct CollocationOptions {
  /// On a rank-deficient basis, retry with column-pivoted QR and drop the
  /// dependent columns instead of raising BasisDegenerate.
  bool pivoted_fallback = false;
};

/// Least-squares fit of sum_{m<M} c_m u_m to `data` at domain.boundary(P),
/// P = data.size() >= 4M.  Columns are scaled to unit boundary norm.
CollocationReport solve_dirichlet(const FormalPowersTable& powers, const PlanarDomain& domain,
                                  std::span<const cplx> data, std::size_t basis_size,
                                  CollocationOptions options = {});
CollocationReport solve_dirichlet(const FormalPowersTable& powers, const PlanarDomain& domain, const Field& data,
                                  std::size_t basis_size, CollocationOptions options = {});

/// T applied in x to log|x + iy - Z| at fixed y, i.e. to log|t - Z'| with
/// Z' = Z - iy: log|x + iy - Z| + beta_0 Re(log((Z'+x)(Z'-x)) + 2 Q_1(Z'/x))
/// + 2 sum_{n>=1} beta_n/(2n+1) Re(Q_{n+1}(Z'/x) - Q_{n-1}(Z'/x)).
/// Real for real q.  DomainError when Z' lies on the segment [-|x|, |x|].
cplx mfs_image(const LegendreKernel& kern, cplx source, double x, double y);

/// Sources on a circle of kSourceRadiusFactor * circumradius about the centre.
std::vector<cplx> source_circle(const PlanarDomain& domain, std::size_t count,
                                double factor = kSourceRadiusFactor);

struct MfsOptions : CollocationOptions {
  /// Adds u_0 = f = T[1] as an extra column (the constant harmonic).
  bool constant_term = true;
};

/// Least-squares collocation of sum_j w_j mfs_image(Z_j; .) (+ c f) against
/// `data` at domain.boundary(P), P = data.size().  Coefficients are the
/// source weights followed by the constant, when present.
CollocationReport mfs_solve(const LegendreKernel& kern, const PlanarDomain& domain, std::span<const cplx> data,
                            std::span<const cplx> sources, MfsOptions options = {});
CollocationReport mfs_solve(const LegendreKernel& kern, const PlanarDomain& domain, const Field& data,
                            std::span<const cplx> sources, MfsOptions options = {});

/// x, y, Re u, Im u on an n x n lattice of the domain's bounding box,
/// points outside the shape skipped.
void write_field_csv(std::ostream& out, const PlanarDomain& domain, const Field& field, std::size_t n);

}  // namespace transmute
