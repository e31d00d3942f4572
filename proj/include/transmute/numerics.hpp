#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "transmute/grid.hpp"

namespace transmute {

using cplx = std::complex<double>;
using Samples = std::vector<cplx>;

// ---------------------------------------------------------------------------
// Polynomials

/// Power-basis coefficients; coeffs[k] multiplies x^k.
struct PolynomialCoeffs {
  std::vector<double> coeffs;

  std::size_t degree() const noexcept { return coeffs.empty() ? 0 : coeffs.size() - 1; }
  double operator()(double x) const noexcept;
};

/// Largest order accepted by the coefficient generators.
inline constexpr std::size_t kMaxPolynomialOrder = 200;

/// Coefficients of the Legendre polynomial P_n (the l_{k,n}).
PolynomialCoeffs legendre_coeffs(std::size_t n);
/// Coefficients of the physicists' Hermite polynomial H_n (the h_{k,n}).
PolynomialCoeffs hermite_coeffs(std::size_t n);

double legendre_p(std::size_t n, double x) noexcept;
/// P_0(x) .. P_{out.size()-1}(x) by the three-term recurrence.
void legendre_p_all(double x, std::span<double> out) noexcept;

/// Laguerre polynomial L_n(t) by the three-term recurrence.
double laguerre_eval(std::size_t n, double t) noexcept;
void laguerre_all(double t, std::span<double> out) noexcept;

// ---------------------------------------------------------------------------
// Special functions

/// Spherical Bessel function of the first kind j_n(z).
cplx spherical_bessel_j(std::size_t n, cplx z);

/// j_0(z) .. j_{n_max}(z).
///
/// Real-dominated arguments with |z| >= n_max use upward recurrence from the
/// closed forms of j_0, j_1.  Everything else uses Miller's downward
/// recurrence started well above max(n_max, |z|) and normalised against
/// whichever of j_0, j_1 is larger in modulus.
std::vector<cplx> spherical_bessel_j_all(std::size_t n_max, cplx z);
void spherical_bessel_j_all(cplx z, std::span<cplx> out);

/// Legendre function of the second kind Q_n(z), z off the cut [-1, 1].
///
/// Q_0 is 0.5 Log((z+1)/(z-1)) on the principal branch.  Higher orders come
/// from backward (Miller) recurrence normalised by Q_0, seeded deep enough
/// that the start-up error has decayed below double precision; the upward
/// recurrence is unstable off the cut because Q_n is the minimal solution.
cplx legendre_q(std::size_t n, cplx z);
std::vector<cplx> legendre_q_all(std::size_t n_max, cplx z);

/// True when z is inside the guard band around the cut [-1, 1].
bool on_legendre_cut(cplx z) noexcept;

// ---------------------------------------------------------------------------
// Quadrature and interpolation on a Grid

/// Cumulative integral F with F(0) = 0 and F' = samples.
///
/// Each interval is integrated with the quintic interpolant through six
/// neighbouring nodes (centred when possible), so the rule is exact for
/// polynomials of degree <= 5 and converges at order 6.  Stencils stay inside
/// the grid segments delimited by break nodes.
template <class T>
std::vector<T> antiderivative(std::span<const T> samples, const Grid& grid);

/// Integral over the whole grid with the same rule.
template <class T>
T integrate(std::span<const T> samples, const Grid& grid);

/// Local 8-point Lagrange interpolation (degree 7) of tabulated values; the
/// stencil stays inside the segment holding x.
template <class T>
T interpolate(const Grid& grid, std::span<const T> values, double x);

// ---------------------------------------------------------------------------
// Dense least squares

template <class T>
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  T& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * cols_ + j]; }
  const T& operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * cols_ + j]; }
  double frobenius_norm() const noexcept;

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<T> data_;
};

template <class T>
struct LstsqResult {
  std::vector<T> x;
  double residual_norm = 0.0;
  /// min |R_jj| / ||A||_F, the quantity tested against the rank threshold.
  double min_diagonal_ratio = 0.0;
  /// max |R_jj| / min |R_jj|, a cheap condition estimate.
  double condition_estimate = 0.0;
};

inline constexpr double kRankTolerance = 1e-13;

/// Minimise ||A x - b||_2 by Householder QR.  Throws RankDeficient when a
/// diagonal entry of R falls below kRankTolerance * ||A||_F.
template <class T>
LstsqResult<T> lstsq(const Matrix<T>& a, std::span<const T> b);

/// Householder QR with column pivoting; columns whose pivot falls below the
/// rank threshold are dropped (their coefficients are zero).
template <class T>
LstsqResult<T> lstsq_pivoted(const Matrix<T>& a, std::span<const T> b);

// ---------------------------------------------------------------------------

/// Neumaier-compensated accumulator.
template <class T>
class CompensatedSum {
 public:
  void add(T v) noexcept;
  T value() const noexcept { return sum_ + comp_; }

 private:
  T sum_{};
  T comp_{};
};

}  // namespace transmute
