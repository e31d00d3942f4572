#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "transmute/errors.hpp"
#include "transmute/formal_powers.hpp"

namespace transmute {

inline constexpr std::size_t kDefaultLegendreOrder = 32;
inline constexpr std::size_t kDefaultTailMargin = 8;

enum class BetaMethod {
  /// Two-step recurrence in n driven by f, f' and phi_1 (default).
  recurrence,
  /// The closed formula (2n+1)/2 (sum_k l_{k,n} phi_k / x^k - 1).  Loses
  /// roughly n*log10(1+sqrt 2) digits to cancellation; kept for cross-checks.
  direct,
};

struct LegendreOptions {
  std::size_t margin = kDefaultTailMargin;
  BetaMethod method = BetaMethod::recurrence;
};

/// Fourier-Legendre coefficients beta_n(x) of the transmutation kernel,
/// K(x,t) = sum_n beta_n(x)/x P_n(t/x), tabulated on a grid.
struct LegendreKernel {
  Grid grid;
  std::size_t order = 0;   // truncation N
  std::size_t margin = 0;  // extra coefficients kept for the tail window
  std::vector<Samples> beta;  // beta[n], n = 0..order+margin
  std::vector<double> tail;   // eps_hat_N at every node
  Diagnostics diagnostics;

  /// beta_n at an arbitrary abscissa of the grid.
  cplx beta_at(std::size_t n, double x) const;
  /// All beta_0..beta_{count-1} at x (node values when x is a node).
  void betas_at(double x, std::span<cplx> out) const;
};

LegendreKernel build_beta(const FormalPowersTable& powers, std::size_t order = kDefaultLegendreOrder,
                          LegendreOptions options = {});

/// K_N(x, t); DomainError unless |t| <= |x|.  K_N(0, 0) is 0.
cplx kernel_eval(const LegendreKernel& kern, double x, double t);

/// u_N(w, x) = e^{iwx} + 2 sum_{n<=N} i^n beta_n(x) j_n(w x).
cplx solve_u_nsbf(const LegendreKernel& kern, cplx omega, double x);

struct CertifiedValue {
  cplx value;
  double bound;  // heuristic: eps_hat_N(x) * ||e^{iwt}||_{L2(-x,x)}
};
CertifiedValue solve_u_nsbf_certified(const LegendreKernel& kern, cplx omega, double x);

struct TailReport {
  double eps_hat = 0.0;     // estimate of ||K - K_N||_{L2(-x,x)}
  double real_bound = 0.0;  // eps_hat * sqrt(2|x|), valid for real w
  double x = 0.0;
  bool stagnant = false;

  /// eps_hat * sinh(C|x|)/C for the strip |Im w| <= C (|x| at C = 0).
  double strip_bound(double c) const;
};

/// Heuristic tail: sqrt((2/|x|) sum_{n=N+1}^{N+m} |beta_n|^2/(2n+1)) with a
/// geometric extrapolation beyond the window.  Interpolated between nodes.
TailReport tail_estimate(const LegendreKernel& kern, double x);

/// ||e^{iwt}||_{L2(-x,x)} = sqrt(sinh(2|Im w||x|)/|Im w|).
double plane_wave_norm(cplx omega, double x);

/// Long-format coefficient dump shared by all representations:
/// rep, x, n, re, im for n < count at every node.
void write_coefficient_csv(std::ostream& out, const char* rep, const Grid& grid,
                           const std::vector<Samples>& coeffs, std::size_t count);
/// beta_n for n <= N with rep = legendre.
void write_kernel_csv(std::ostream& out, const LegendreKernel& kern);

struct SolutionRow {
  cplx omega;
  double x;
  cplx u;
  double eps;
};
/// rep, Re w, Im w, x, Re u, Im u, eps.
void write_solution_csv(std::ostream& out, std::span<const SolutionRow> rows, const char* rep);

}  // namespace transmute
