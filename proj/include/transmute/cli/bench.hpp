#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <vector>

#include "transmute/cli/job.hpp"
#include "transmute/potential.hpp"

namespace transmute::cli {

/// NSBF (Legendre, kernel on [0, b]) against a fixed-step RK4 shooting
/// baseline with the same number of steps as the NSBF grid has intervals.
/// Reference values come from the closed form when q is a constant and from
/// the adaptive reference integrator otherwise.
struct BenchReport {
  struct Order {
    std::size_t N;
    double build_seconds;  // seed + phi_1 + beta_0..beta_N
    double eval_seconds;   // one u_N(w, x), averaged over the w and x grids
    double max_error;      // over bench.omega x the x grid
  };
  struct Omega {
    double omega;
    double nsbf_error, shooting_error;
    double nsbf_seconds, shooting_seconds;  // per evaluation point
  };
  struct GridSize {
    std::size_t M;
    double build_seconds;
  };
  struct Eigen {
    std::size_t n;
    double reference;
    double nsbf_error, shooting_error;
  };
  std::vector<Order> orders;
  std::vector<Omega> omegas;
  std::vector<GridSize> grids;
  std::vector<Eigen> eigen;
  /// eval time at the largest bench omega over the smallest
  double eval_ratio = 0.0;
  /// build time at the last grid size over the first
  double build_ratio = 0.0;
};

/// `constant` is the value of q when it is known to be constant.
BenchReport run_bench(const JobConfig& config, const Potential& q, std::optional<double> constant);

void write_bench_orders_csv(std::ostream& out, const BenchReport& r);
void write_bench_omega_csv(std::ostream& out, const BenchReport& r);
void write_bench_grid_csv(std::ostream& out, const BenchReport& r);
void write_bench_eigen_csv(std::ostream& out, const BenchReport& r);
/// Human-readable tables.
void print_bench_summary(std::ostream& out, const BenchReport& r);

/// u'' = (q - w^2) u from u(0) = y0, u'(0) = dy0 by classical RK4 with
/// `steps` equal steps on [0, b]; u at every step node.
std::vector<cplx> rk4_fixed(const Potential& q, cplx omega, cplx y0, cplx dy0, double b, std::size_t steps);

}  // namespace transmute::cli
