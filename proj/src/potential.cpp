#include "transmute/potential.hpp"

#include <algorithm>
#include <cmath>

#include "transmute/errors.hpp"

namespace transmute {

Potential::Potential() : fn_([](double) { return cplx{0.0}; }) {}

Potential Potential::constant(cplx value) {
  Potential p;
  p.fn_ = [value](double) { return value; };
  p.real_ = value.imag() == 0.0;
  p.zero_ = value == cplx{0.0};
  p.label_ = value.imag() == 0.0 ? std::to_string(value.real())
                                 : "(" + std::to_string(value.real()) + "," +
                                       std::to_string(value.imag()) + ")";
  return p;
}

Potential Potential::from_function(Fn fn, bool real_valued, std::string label,
                                   std::vector<double> breakpoints) {
  Potential p;
  p.fn_ = std::move(fn);
  p.real_ = real_valued;
  p.zero_ = false;
  p.label_ = std::move(label);
  std::sort(breakpoints.begin(), breakpoints.end());
  p.breaks_ = std::move(breakpoints);
  return p;
}

Potential Potential::from_samples(std::vector<double> xs, std::vector<cplx> values,
                                  std::string label) {
  if (xs.size() != values.size() || xs.size() < 2)
    throw DomainError("potential samples: need at least two (x, q) pairs");
  std::vector<Piece> pieces(1);
  std::vector<double> breaks;
  bool real = true;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!std::isfinite(xs[i]) || !std::isfinite(values[i].real()) ||
        !std::isfinite(values[i].imag()))
      throw DomainError("potential samples: non-finite entry");
    if (values[i].imag() != 0.0) real = false;
    if (i > 0) {
      if (xs[i] < xs[i - 1]) throw DomainError("potential samples: abscissae must increase");
      if (xs[i] == xs[i - 1]) {
        breaks.push_back(xs[i]);
        pieces.emplace_back();
      }
    }
    pieces.back().xs.push_back(xs[i]);
    pieces.back().values.push_back(values[i]);
  }
  for (const auto& piece : pieces)
    if (piece.xs.size() < 2) throw DomainError("potential samples: each piece needs two samples");

  Potential p;
  p.pieces_ = std::make_shared<const std::vector<Piece>>(std::move(pieces));
  p.fn_ = nullptr;
  p.breaks_ = std::move(breaks);
  p.real_ = real;
  p.zero_ = false;
  p.label_ = std::move(label);
  return p;
}

cplx Potential::eval_pieces(double x, int side) const {
  const auto& pieces = *pieces_;
  std::size_t k = 0;
  while (k + 1 < pieces.size()) {
    const double end = pieces[k].xs.back();
    if (x < end || (x == end && side < 0)) break;
    ++k;
  }
  const auto& xs = pieces[k].xs;
  const auto& vs = pieces[k].values;
  if (x < xs.front() - 1e-12 * std::max(1.0, std::abs(x)) ||
      x > xs.back() + 1e-12 * std::max(1.0, std::abs(x)))
    throw DomainError("potential samples: abscissa " + std::to_string(x) + " outside the table");
  const std::size_t n = xs.size();
  std::size_t i = static_cast<std::size_t>(std::upper_bound(xs.begin(), xs.end(), x) - xs.begin());
  i = std::clamp<std::size_t>(i, 1, n - 1) - 1;  // interval [i, i+1]
  const std::size_t cnt = std::min<std::size_t>(4, n);
  std::size_t lo = i > 0 ? i - 1 : 0;
  if (lo + cnt > n) lo = n - cnt;
  cplx acc = 0.0;
  for (std::size_t j = 0; j < cnt; ++j) {
    double l = 1.0;
    for (std::size_t m = 0; m < cnt; ++m)
      if (m != j) l *= (x - xs[lo + m]) / (xs[lo + j] - xs[lo + m]);
    acc += l * vs[lo + j];
  }
  return acc;
}

cplx Potential::limit(double x, int side) const {
  if (pieces_) return eval_pieces(x, side);
  if (!breaks_.empty()) {
    for (double b : breaks_) {
      if (std::abs(x - b) <= 1e-13 * std::max(1.0, std::abs(b))) {
        const double dx = 1e-12 * std::max(1.0, std::abs(b));
        return fn_(side < 0 ? b - dx : b + dx);
      }
    }
  }
  return fn_(x);
}

Samples Potential::sample(const Grid& grid) const {
  Samples out(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) out[i] = limit(grid[i], +1);
  return out;
}

}  // namespace transmute
