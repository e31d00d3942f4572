#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "transmute/errors.hpp"
#include "transmute/formal_powers.hpp"

namespace transmute {

inline constexpr std::size_t kDefaultLaguerreOrder = 40;
inline constexpr std::size_t kDefaultHermiteOrder = 40;
inline constexpr std::size_t kMaxLaguerreOrder = 120;
inline constexpr std::size_t kMaxHermiteOrder = 100;
/// Extra coefficients used by the tail heuristics when the table has them.
inline constexpr std::size_t kAltTailMargin = 8;
/// |coefficient| below this fraction of the largest partial sum is flagged.
inline constexpr double kCancellationRatio = 1e-12;

/// Fourier-Laguerre coefficients a_n(x) of k(x, t) = K~(x, x - t) e^t.
struct LaguerreKernel {
  Grid grid;
  std::size_t order = 0;
  std::size_t margin = 0;     // a_n kept for n <= order + margin
  std::vector<Samples> a;
  std::vector<double> tail;   // sqrt(sum_{n>N} |a_n|^2), heuristic
  Diagnostics diagnostics;

  cplx a_at(std::size_t n, double x) const;
};

/// Fourier-Hermite coefficients c_n(x) of the zero extension of K(x, .).
struct HermiteKernel {
  Grid grid;
  std::size_t order = 0;
  std::size_t margin = 0;
  std::vector<Samples> c;
  std::vector<double> tail;   // sqrt(sum_{n>N} |c_n|^2 sqrt(pi) 2^n n!), heuristic
  Diagnostics diagnostics;

  cplx c_at(std::size_t n, double x) const;
};

/// Needs N <= powers.k_max <= kMaxLaguerreOrder.  Up to kAltTailMargin
/// further coefficients are computed when the table reaches them; without
/// any the tail is reported as infinite.
LaguerreKernel build_a(const FormalPowersTable& powers, std::size_t order = kDefaultLaguerreOrder);
HermiteKernel build_c(const FormalPowersTable& powers, std::size_t order = kDefaultHermiteOrder);

/// e^{iwx} (1 + sum_{n<=N} a_n(x) (iw)^n / (1+iw)^{n+1}); DomainError for
/// Im w >= 1/2 or x < 0.
cplx solve_u_laguerre(const LaguerreKernel& kern, cplx omega, double x);
/// e^{iwx} + sqrt(pi) e^{-w^2/4} sum_{n<=N} c_n(x) (iw)^n.  A Magnitude
/// warning goes to `diag` when |w| > 2 sqrt(N).
cplx solve_u_hermite(const HermiteKernel& kern, cplx omega, double x, Diagnostics* diag = nullptr);

/// K~(x, y) = sum_{n<=N} a_n(x) L_n(x - y) e^{-(x-y)} for x > 0, |y| <= x.
cplx kernel_eval_laguerre(const LaguerreKernel& kern, double x, double y);

/// Certificates: eps_N(x) e^{-Im w x} / sqrt(1 - 2 Im w) for Laguerre and
/// pi^{1/4} e^{(Im w)^2/2} eps_N(x) for Hermite, eps_N from the tail window.
double laguerre_bound(const LaguerreKernel& kern, cplx omega, double x);
double hermite_bound(const HermiteKernel& kern, cplx omega, double x);

void write_laguerre_csv(std::ostream& out, const LaguerreKernel& kern);
void write_hermite_csv(std::ostream& out, const HermiteKernel& kern);

}  // namespace transmute
