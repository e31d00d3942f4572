#pragma once

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "transmute/numerics.hpp"

namespace transmute {

/// The coefficient q(x) of y'' - q y = -w^2 y.
///
/// Either a callable (analytic expression, user lambda) or tabulated samples
/// interpolated piecewise-cubically.  Jumps are expressed as break points;
/// `limit` evaluates the one-sided limit so integrators never mix the two
/// sides of a jump inside one step.
class Potential {
 public:
  using Fn = std::function<cplx(double)>;

  Potential();  // q == 0

  static Potential constant(cplx value);
  static Potential from_function(Fn fn, bool real_valued, std::string label,
                                 std::vector<double> breakpoints = {});
  /// Samples at strictly increasing abscissae; a repeated abscissa marks a
  /// jump (first value is the left limit, second the right limit).
  static Potential from_samples(std::vector<double> xs, std::vector<cplx> values,
                                std::string label = "samples");

  cplx operator()(double x) const { return limit(x, +1); }
  /// side < 0: limit from the left, side > 0: limit from the right.
  cplx limit(double x, int side) const;

  bool is_real() const noexcept { return real_; }
  bool is_zero() const noexcept { return zero_; }
  const std::vector<double>& breakpoints() const noexcept { return breaks_; }
  const std::string& label() const noexcept { return label_; }

  /// Values at every node of the grid (right limits at breaks).
  Samples sample(const Grid& grid) const;

 private:
  struct Piece {
    std::vector<double> xs;
    std::vector<cplx> values;
  };
  cplx eval_pieces(double x, int side) const;

  Fn fn_;
  std::shared_ptr<const std::vector<Piece>> pieces_;
  std::vector<double> breaks_;
  std::string label_ = "0";
  bool real_ = true;
  bool zero_ = true;
};

}  // namespace transmute
