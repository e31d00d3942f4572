#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <vector>

#include "transmute/errors.hpp"
#include "transmute/grid.hpp"

namespace transmute::detail {

struct WindowEnergy {
  double energy = 0.0;  // window plus geometric remainder
  bool flat = false;    // no decay across the window
};

// Energy terms of the window n = N+1..N+m, split into halves to read off a
// decay factor s per half-window; the unseen remainder is then E2 s/(1-s).
inline WindowEnergy window_energy(std::span<const double> terms) {
  const std::size_t half = terms.size() / 2;
  double e1 = 0.0, e2 = 0.0;
  for (std::size_t j = 0; j < terms.size(); ++j) (j < half ? e1 : e2) += terms[j];
  WindowEnergy w{e1 + e2, false};
  if (half > 0 && e1 > 0.0) {
    const double s = e2 / e1;
    if (s < 1.0)
      w.energy += e2 * s / (1.0 - s);
    else
      w.flat = true;
  }
  return w;
}

// Node value, or between nodes the largest of the three nearest (the tail is
// only a heuristic, so err on the safe side).
inline double tail_at(const Grid& grid, const std::vector<double>& tail, double x) {
  std::size_t idx;
  if (grid.node_index(x, idx)) return tail[idx];
  if (!grid.contains(x)) throw DomainError("x outside the kernel grid");
  const std::size_t a = grid.nearest(x);
  const std::size_t lo = a > 0 ? a - 1 : a, hi = std::min(a + 1, grid.size() - 1);
  return std::max({tail[lo], tail[a], tail[hi]});
}

}  // namespace transmute::detail
