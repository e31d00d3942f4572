#include "transmute/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "transmute/errors.hpp"

namespace transmute {

Grid::Grid(double left, double right, std::size_t intervals) {
  if (!(std::isfinite(left) && std::isfinite(right)) || !(left < right))
    throw DomainError("grid: need finite left < right");
  if (left > 0.0 || right < 0.0) throw DomainError("grid: interval must contain 0");
  if (intervals < 16) throw DomainError("grid: at least 16 intervals required");

  h_ = (right - left) / static_cast<double>(intervals);
  const double z = -left / h_;
  const double zr = std::round(z);
  if (std::abs(z - zr) > 1e-9) throw DomainError("grid: 0 must be a grid node");
  zero_ = static_cast<std::size_t>(zr);

  points_.resize(intervals + 1);
  for (std::size_t i = 0; i <= intervals; ++i)
    points_[i] = (static_cast<double>(i) - static_cast<double>(zero_)) * h_;
}

Grid Grid::symmetric(double b, std::size_t intervals) {
  if (intervals % 2 != 0) throw DomainError("grid: symmetric grid needs an even interval count");
  return Grid(-b, b, intervals);
}

Grid Grid::half(double b, std::size_t intervals) { return Grid(0.0, b, intervals); }

bool Grid::contains(double x) const noexcept {
  const double tol = 1e-12 * std::max(1.0, std::abs(x));
  return x >= left() - tol && x <= right() + tol;
}

std::size_t Grid::nearest(double x) const noexcept {
  const double r = std::round(x / h_) + static_cast<double>(zero_);
  if (r <= 0.0) return 0;
  const auto i = static_cast<std::size_t>(r);
  return std::min(i, size() - 1);
}

bool Grid::node_index(double x, std::size_t& index) const noexcept {
  const std::size_t i = nearest(x);
  if (std::abs(points_[i] - x) <= 1e-9 * h_) {
    index = i;
    return true;
  }
  return false;
}

void Grid::set_breaks(std::span<const double> xs) {
  breaks_.clear();
  for (double x : xs) {
    if (!contains(x)) continue;
    const std::size_t i = nearest(x);
    if (i == 0 || i + 1 == size()) continue;
    breaks_.push_back(i);
  }
  std::sort(breaks_.begin(), breaks_.end());
  breaks_.erase(std::unique(breaks_.begin(), breaks_.end()), breaks_.end());
}

std::vector<std::pair<std::size_t, std::size_t>> Grid::segments() const {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  std::size_t first = 0;
  for (std::size_t b : breaks_) {
    out.emplace_back(first, b);
    first = b;
  }
  out.emplace_back(first, size() - 1);
  return out;
}

}  // namespace transmute
