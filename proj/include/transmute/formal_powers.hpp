#pragma once

#include <cstddef>
#include <iosfwd>
#include <vector>

#include "transmute/grid.hpp"
#include "transmute/numerics.hpp"
#include "transmute/potential.hpp"

namespace transmute {

inline constexpr std::size_t kDefaultKMax = 64;
/// Seed solutions with min|f| below this fraction of max|f| are rejected.
inline constexpr double kSeedVanishThreshold = 1e-8;

struct Seed {
  Samples f;
  Samples f_prime;
};

/// f'' = q f, f(0) = 1, f'(0) = 0, tabulated on the grid by integrating
/// outward from 0 in both directions.  Throws SeedVanishes when f comes too
/// close to zero for the weights f^{+-2} to be usable.
Seed solve_seed(const Potential& q, const Grid& grid);

/// Tabulated formal powers phi_k = T[x^k] and the auxiliary chains.
struct FormalPowersTable {
  Grid grid;
  Samples f;
  Samples f_prime;
  std::size_t k_max = 0;
  std::vector<Samples> phi;      // phi[k], k = 0..k_max
  std::vector<Samples> X;        // X^{(n)}
  std::vector<Samples> X_tilde;  // X~^{(n)}

  /// phi_k at an arbitrary abscissa (local interpolation between nodes).
  cplx phi_at(std::size_t k, double x) const;
};

/// Builds X^{(n)}, X~^{(n)} for n <= k_max by repeated antiderivatives with
/// weights alternating between f^2 and f^{-2}, and phi_k from them (odd k use
/// the X chain, even k the X~ chain).
FormalPowersTable build_formal_powers(const Grid& grid, Samples f, Samples f_prime, std::size_t k_max);

/// solve_seed followed by build_formal_powers; break points of q are
/// registered on the grid copy stored in the table.
FormalPowersTable make_formal_powers(const Potential& q, Grid grid, std::size_t k_max = kDefaultKMax);

/// CSV dump: x, Re f, Im f, Re df, Im df, Re phi_1, Im phi_1, ... with a header row.
void write_formal_powers_csv(std::ostream& out, const FormalPowersTable& table);
/// Restores a dump produced by write_formal_powers_csv (bit-exact).
FormalPowersTable read_formal_powers_csv(std::istream& in);

}  // namespace transmute
