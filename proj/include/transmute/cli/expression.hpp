#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "transmute/errors.hpp"
#include "transmute/potential.hpp"

namespace transmute::cli {

struct Span {
  std::size_t begin = 0, end = 0;  // [begin, end) in the source text
};

struct ExprNode {
  enum class Kind { Number, Variable, Constant, Negate, Binary, Call };
  Kind kind = Kind::Number;
  double value = 0.0;  // Number, Constant
  std::string name;    // Variable, Constant, Call
  char op = 0;         // Binary: + - * / ^
  std::vector<std::shared_ptr<const ExprNode>> args;
  Span span;
};

/// Which free variables the grammar accepts.  Potentials use x only;
/// boundary data for the planar problems may also use y.
enum class Variables { x, xy };

/// Parsed expression.  ^ is right-associative; precedence ^ > unary - > * / > + -.
class Expression {
 public:
  Expression();  // the constant 0

  double operator()(double x, double y = 0.0) const;
  /// Minimal-parenthesis text that re-parses to the same tree.
  std::string to_string() const;
  bool depends_on_x() const noexcept;
  const ExprNode& root() const noexcept { return *root_; }
  const std::string& source() const noexcept { return source_; }

  /// Structural equality; spans are ignored.
  friend bool operator==(const Expression& a, const Expression& b);

 private:
  friend Expression parse_expression(std::string_view, Variables);
  std::shared_ptr<const ExprNode> root_;
  std::string source_;
};

/// Recursive descent.  Throws ParseError with the 0-based offset of the
/// offending token and what was expected there.
Expression parse_expression(std::string_view text, Variables vars = Variables::x);

/// Wraps an expression as a real potential.  A non-finite value at x is an
/// error unless principal_value_ok, in which case the mean of the values at
/// x -+ step is used (the node value of a grid with that spacing).
Potential make_potential(const Expression& expr, bool principal_value_ok, double step);

}  // namespace transmute::cli
