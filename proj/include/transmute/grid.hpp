#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace transmute {

/// Uniform grid on [left, right] with left <= 0 <= right and 0 a node.
///
/// Nodes are stored as (i - zero_index) * h, so 0 is represented exactly and
/// a symmetric grid is symmetric bit-for-bit.  Optional break nodes mark
/// positions where tabulated integrands may lose smoothness (jumps of q);
/// quadrature stencils never straddle them.
class Grid {
 public:
  Grid(double left, double right, std::size_t intervals);

  /// [-b, b] with the given number of intervals (must be even).
  static Grid symmetric(double b, std::size_t intervals);
  /// [0, b].
  static Grid half(double b, std::size_t intervals);

  std::size_t size() const noexcept { return points_.size(); }
  std::size_t intervals() const noexcept { return points_.size() - 1; }
  double step() const noexcept { return h_; }
  double left() const noexcept { return points_.front(); }
  double right() const noexcept { return points_.back(); }
  std::size_t zero_index() const noexcept { return zero_; }
  double operator[](std::size_t i) const noexcept { return points_[i]; }
  std::span<const double> points() const noexcept { return points_; }

  bool contains(double x) const noexcept;
  /// Index of the node nearest to x (clamped to the grid).
  std::size_t nearest(double x) const noexcept;
  /// Index of x when it coincides with a node to within 1e-9 h.
  bool node_index(double x, std::size_t& index) const noexcept;

  /// Snap the given abscissae to their nearest nodes and register them as breaks.
  void set_breaks(std::span<const double> xs);
  std::span<const std::size_t> breaks() const noexcept { return breaks_; }

  /// Contiguous node ranges [first, last] between consecutive breaks.
  std::vector<std::pair<std::size_t, std::size_t>> segments() const;

 private:
  std::vector<double> points_;
  std::vector<std::size_t> breaks_;
  double h_ = 0.0;
  std::size_t zero_ = 0;
};

}  // namespace transmute
