#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "transmute/errors.hpp"
#include "transmute/kernel_legendre.hpp"
#include "transmute/potential.hpp"

namespace transmute {

inline constexpr double kDefaultScanDensity = 20.0;
/// Scan points per asymptotic eigenvalue spacing pi/b.
inline constexpr double kScanOversampling = 6.0;
/// Bisection stops at |dw| <= kRootTolerance * max(1, w).
inline constexpr double kRootTolerance = 1e-12;
/// Roots closer than this are merged and flagged NearDegenerate.
inline constexpr double kNearDegenerateSpacing = 1e-8;
/// Brackets closer than this many scan steps raise ScanTooCoarse.
inline constexpr std::size_t kMinBracketSteps = 3;
/// A bound-state scan whose strip bound exceeds this is reported.
inline constexpr double kStripTolerance = 1e-6;

/// alpha y + beta y' = 0 at one end.
struct BoundaryCondition {
  double alpha = 1.0;
  double beta = 0.0;
};

/// -y'' + q y = lambda y on [0, b].  The kernel passed alongside is built
/// for q + shift, so lambda = w^2 - shift.  A positive shift keeps the seed
/// solution free of zeros when q dips below the lowest eigenvalue.
struct SpectralProblem {
  Potential q;
  double b = 0.0;
  BoundaryCondition left, right;
  double shift = 0.0;
  double omega_min = 0.0, omega_max = 0.0;  // used by the range search
  double scan_density = 0.0;                // points per unit w; 0 picks the default

  bool dirichlet() const noexcept { return left.beta == 0.0 && right.beta == 0.0; }
  /// max(kDefaultScanDensity, kScanOversampling * b / pi) unless set.
  double density() const noexcept;
};

struct Eigenpair {
  std::size_t index = 0;
  cplx omega;          // kernel frequency: positive real, or i kappa below -shift
  double lambda = 0.0;
  std::vector<double> eigenfunction;  // filled on request, nodes of [0, b]
  double residual = 0.0;     // |Phi_oracle(w_n)| / |Phi_N'(w_n)|, in units of w
  double certificate = 0.0;  // tail-based bound on |w_n - w|, heuristic
};

struct EigenOptions {
  bool bound_states = true;   // count search only: scan w = i kappa first
  bool residuals = true;      // one reference integration per eigenvalue
  bool eigenfunctions = false;
};

struct EigenResult {
  std::vector<Eigenpair> pairs;
  Diagnostics diagnostics;
};

/// Phi(w) = gamma y(b) + delta y'(b) for the solution with y(0) = -beta_L,
/// y'(0) = alpha_L built from Re u_N and Im u_N / w.  Dirichlet gives
/// Im u_N(w, b) / w.  y'(b) is a 5-point one-sided difference on the grid.
double characteristic(const SpectralProblem& problem, const LegendreKernel& kern, double omega);
/// The same functional at w = i kappa, kappa > 0.
double characteristic_imag(const SpectralProblem& problem, const LegendreKernel& kern, double kappa);

/// The first `count` eigenpairs, indexed from 1 in increasing lambda.
EigenResult find_eigenvalues(const SpectralProblem& problem, const LegendreKernel& kern, std::size_t count,
                             EigenOptions options = {});
/// All eigenpairs with w in [omega_min, omega_max]; indices from the
/// number of interior sign changes of the eigenfunction.
EigenResult find_eigenvalues_in_range(const SpectralProblem& problem, const LegendreKernel& kern,
                                      EigenOptions options = {});

/// y on the grid nodes of [0, b] scaled to unit L2 norm; before scaling
/// y(0) = -beta_L and y'(0) = alpha_L.
std::vector<double> eigenfunction(const SpectralProblem& problem, const LegendreKernel& kern, const Eigenpair& pair);
/// Grid nodes of [0, b] used for eigenfunction samples.
std::vector<double> eigenfunction_nodes(const SpectralProblem& problem, const LegendreKernel& kern);

/// n, omega_re, omega_im, lambda, residual, certificate.
void write_eigen_csv(std::ostream& out, std::span<const Eigenpair> pairs);
/// x, y_<index>... for pairs carrying eigenfunctions.
void write_eigenfunction_csv(std::ostream& out, std::span<const double> nodes, std::span<const Eigenpair> pairs);

}  // namespace transmute
