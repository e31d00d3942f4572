#include "transmute/cli/expression.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>
#include <sstream>

#include "transmute/csv.hpp"

namespace transmute::cli {

namespace {

using Node = std::shared_ptr<const ExprNode>;

constexpr std::array<std::string_view, 10> kFunctions{"sin", "cos", "tan", "exp", "log", "sqrt", "abs", "sinh", "cosh", "tanh"};

const std::string kOperand = "a number, a variable, a constant, a function call or '('";

class Parser {
 public:
  Parser(std::string_view text, Variables vars) : s_(text), vars_(vars) {}

  Node parse() {
    Node e = sum();
    skip();
    if (pos_ < s_.size()) fail(s_[pos_] == ')' ? "end of input (unbalanced ')')" : "an operator or end of input");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& expected) const { throw ParseError(pos_, expected, std::string(s_)); }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool accept(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  static Node make(ExprNode n) { return std::make_shared<const ExprNode>(std::move(n)); }

  Node binary(char op, Node l, Node r) {
    ExprNode n;
    n.kind = ExprNode::Kind::Binary;
    n.op = op;
    n.span = {l->span.begin, r->span.end};
    n.args = {std::move(l), std::move(r)};
    return make(std::move(n));
  }

  // sum := product (('+' | '-') product)*
  Node sum() {
    Node l = product();
    for (;;) {
      skip();
      if (pos_ < s_.size() && (s_[pos_] == '+' || s_[pos_] == '-')) {
        const char op = s_[pos_++];
        l = binary(op, l, product());
      } else {
        return l;
      }
    }
  }

  // product := unary (('*' | '/') unary)*
  Node product() {
    Node l = unary();
    for (;;) {
      skip();
      if (pos_ < s_.size() && (s_[pos_] == '*' || s_[pos_] == '/')) {
        const char op = s_[pos_++];
        l = binary(op, l, unary());
      } else {
        return l;
      }
    }
  }

  // unary := '-' unary | power
  Node unary() {
    skip();
    const std::size_t start = pos_;
    if (accept('-')) {
      Node arg = unary();
      ExprNode n;
      n.kind = ExprNode::Kind::Negate;
      n.span = {start, arg->span.end};
      n.args = {std::move(arg)};
      return make(std::move(n));
    }
    return power();
  }

  // power := primary ('^' unary)?   right-associative through unary
  Node power() {
    Node base = primary();
    if (accept('^')) return binary('^', base, unary());
    return base;
  }

  Node primary() {
    skip();
    const std::size_t start = pos_;
    if (pos_ >= s_.size()) fail(kOperand);
    const char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      Node inner = sum();
      if (!accept(')')) fail("')'");
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
      const std::string id(s_.substr(start, pos_ - start));
      ExprNode n;
      n.name = id;
      n.span = {start, pos_};
      if (id == "x" || (id == "y" && vars_ == Variables::xy)) {
        n.kind = ExprNode::Kind::Variable;
        return make(std::move(n));
      }
      if (id == "pi" || id == "e") {
        n.kind = ExprNode::Kind::Constant;
        n.value = id == "pi" ? std::numbers::pi : std::numbers::e;
        return make(std::move(n));
      }
      for (const auto f : kFunctions)
        if (id == f) {
          if (!accept('(')) fail("'(' after " + id);
          Node arg = sum();
          if (!accept(')')) fail("')'");
          n.kind = ExprNode::Kind::Call;
          n.span.end = pos_;
          n.args = {std::move(arg)};
          return make(std::move(n));
        }
      pos_ = start;
      fail(std::string(vars_ == Variables::xy ? "x, y" : "x") + ", pi, e or one of sin cos tan exp log sqrt abs sinh cosh tanh (unknown identifier '" + id + "')");
    }
    fail(kOperand);
  }

  Node number() {
    const std::size_t start = pos_;
    while (pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.')) ++pos_;
    // exponent only when digits follow, so "2e" is not swallowed
    if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
      std::size_t p = pos_ + 1;
      if (p < s_.size() && (s_[p] == '+' || s_[p] == '-')) ++p;
      if (p < s_.size() && std::isdigit(static_cast<unsigned char>(s_[p]))) {
        pos_ = p;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      }
    }
    double v = 0.0;
    const auto [end, ec] = std::from_chars(s_.data() + start, s_.data() + pos_, v);
    if (ec != std::errc() || end != s_.data() + pos_ || !std::isfinite(v)) {
      pos_ = start;
      fail("a finite number");
    }
    ExprNode n;
    n.kind = ExprNode::Kind::Number;
    n.value = v;
    n.span = {start, pos_};
    return make(std::move(n));
  }

  std::string_view s_;
  Variables vars_;
  std::size_t pos_ = 0;
};

double eval(const ExprNode& n, double x, double y) {
  switch (n.kind) {
    case ExprNode::Kind::Number:
    case ExprNode::Kind::Constant: return n.value;
    case ExprNode::Kind::Variable: return n.name == "x" ? x : y;
    case ExprNode::Kind::Negate: return -eval(*n.args[0], x, y);
    case ExprNode::Kind::Binary: {
      const double a = eval(*n.args[0], x, y), b = eval(*n.args[1], x, y);
      switch (n.op) {
        case '+': return a + b;
        case '-': return a - b;
        case '*': return a * b;
        case '/': return a / b;
        default: return std::pow(a, b);
      }
    }
    case ExprNode::Kind::Call: {
      const double a = eval(*n.args[0], x, y);
      const std::string& f = n.name;
      if (f == "sin") return std::sin(a);
      if (f == "cos") return std::cos(a);
      if (f == "tan") return std::tan(a);
      if (f == "exp") return std::exp(a);
      if (f == "log") return std::log(a);
      if (f == "sqrt") return std::sqrt(a);
      if (f == "abs") return std::abs(a);
      if (f == "sinh") return std::sinh(a);
      if (f == "tanh") return std::tanh(a);
      return std::cosh(a);
    }
  }
  return 0.0;
}

// binding strength: 1 + -, 2 * /, 3 unary -, 4 ^, 5 atoms and calls
int strength(const ExprNode& n) {
  switch (n.kind) {
    case ExprNode::Kind::Negate: return 3;
    case ExprNode::Kind::Binary: return n.op == '^' ? 4 : (n.op == '*' || n.op == '/') ? 2 : 1;
    default: return 5;
  }
}

void print(const ExprNode& n, std::ostream& out);

void print_at(const ExprNode& n, int min_strength, std::ostream& out) {
  if (strength(n) < min_strength) {
    out << '(';
    print(n, out);
    out << ')';
  } else {
    print(n, out);
  }
}

void print(const ExprNode& n, std::ostream& out) {
  switch (n.kind) {
    case ExprNode::Kind::Number: out << csv::format(n.value); break;
    case ExprNode::Kind::Variable:
    case ExprNode::Kind::Constant: out << n.name; break;
    case ExprNode::Kind::Negate:
      out << '-';
      print_at(*n.args[0], 3, out);
      break;
    case ExprNode::Kind::Call:
      out << n.name << '(';
      print(*n.args[0], out);
      out << ')';
      break;
    case ExprNode::Kind::Binary: {
      const int s = strength(n);
      if (n.op == '^') {
        print_at(*n.args[0], 5, out);
        out << '^';
        print_at(*n.args[1], 3, out);
      } else {
        // left-associative: an equal-strength right operand keeps its brackets
        print_at(*n.args[0], s, out);
        out << ' ' << n.op << ' ';
        print_at(*n.args[1], s + 1, out);
      }
      break;
    }
  }
}

bool same(const ExprNode& a, const ExprNode& b) {
  if (a.kind != b.kind || a.op != b.op || a.name != b.name || a.args.size() != b.args.size()) return false;
  if ((a.kind == ExprNode::Kind::Number || a.kind == ExprNode::Kind::Constant) && a.value != b.value) return false;
  for (std::size_t i = 0; i < a.args.size(); ++i)
    if (!same(*a.args[i], *b.args[i])) return false;
  return true;
}

bool uses_x(const ExprNode& n) {
  if (n.kind == ExprNode::Kind::Variable) return n.name == "x";
  for (const auto& a : n.args)
    if (uses_x(*a)) return true;
  return false;
}

}  // namespace

Expression::Expression() : root_(std::make_shared<const ExprNode>()), source_("0") {}

double Expression::operator()(double x, double y) const { return eval(*root_, x, y); }

std::string Expression::to_string() const {
  std::ostringstream out;
  print(*root_, out);
  return out.str();
}

bool Expression::depends_on_x() const noexcept { return uses_x(*root_); }

bool operator==(const Expression& a, const Expression& b) { return same(*a.root_, *b.root_); }

Expression parse_expression(std::string_view text, Variables vars) {
  Expression e;
  e.root_ = Parser(text, vars).parse();
  e.source_ = std::string(text);
  return e;
}

Potential make_potential(const Expression& expr, bool principal_value_ok, double step) {
  if (!expr.depends_on_x()) {
    const double v = expr(0.0);
    if (!std::isfinite(v)) throw DomainError("potential " + expr.source() + " is not finite");
    return v == 0.0 ? Potential() : Potential::constant(v);
  }
  auto fn = [expr, principal_value_ok, step](double x) -> cplx {
    const double v = expr(x);
    if (std::isfinite(v)) return v;
    if (principal_value_ok) {
      const double m = 0.5 * (expr(x - step) + expr(x + step));
      if (std::isfinite(m)) return m;
    }
    std::ostringstream msg;
    msg << "potential " << expr.source() << " is singular at x = " << x
        << (principal_value_ok ? "" : " (set principal_value_ok to average the neighbouring nodes)");
    throw DomainError(msg.str());
  };
  return Potential::from_function(fn, true, expr.source());
}

}  // namespace transmute::cli
