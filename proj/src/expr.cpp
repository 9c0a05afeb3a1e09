#include "nsoc/expr.hpp"

#include <cctype>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

namespace nsoc {

struct Expression::Node {
  enum class Kind { number, var1, var2, add, sub, mul, div, pow, neg, call } kind;
  double value = 0.0;
  std::string fn;
  std::shared_ptr<const Node> a, b;
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;
using Kind = Expression::Node::Kind;

NodePtr make(Kind k, NodePtr a = nullptr, NodePtr b = nullptr) {
  auto n = std::make_shared<Expression::Node>();
  n->kind = k;
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

struct Parser {
  const std::string& s;
  std::size_t pos = 0;

  explicit Parser(const std::string& text) : s(text) {}

  void skip() {
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
  }
  bool eat(char c) {
    skip();
    if (pos < s.size() && s[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }
  [[noreturn]] void fail(const std::string& what) const {
    throw std::invalid_argument("expression: " + what + " at position " + std::to_string(pos) +
                                " in '" + s + "'");
  }

  NodePtr parse_sum() {
    NodePtr left = parse_product();
    for (;;) {
      if (eat('+'))
        left = make(Kind::add, left, parse_product());
      else if (eat('-'))
        left = make(Kind::sub, left, parse_product());
      else
        return left;
    }
  }

  NodePtr parse_product() {
    NodePtr left = parse_power();
    for (;;) {
      if (eat('*'))
        left = make(Kind::mul, left, parse_power());
      else if (eat('/'))
        left = make(Kind::div, left, parse_power());
      else
        return left;
    }
  }

  NodePtr parse_power() { // right associative
    NodePtr base = parse_unary();
    if (eat('^')) return make(Kind::pow, base, parse_power());
    return base;
  }

  NodePtr parse_unary() {
    if (eat('-')) return make(Kind::neg, parse_unary());
    if (eat('+')) return parse_unary();
    return parse_atom();
  }

  NodePtr parse_atom() {
    skip();
    if (pos >= s.size()) fail("unexpected end");
    const char c = s[pos];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      std::size_t used = 0;
      const double v = std::stod(s.substr(pos), &used);
      pos += used;
      auto n = std::make_shared<Expression::Node>();
      n->kind = Kind::number;
      n->value = v;
      return n;
    }
    if (c == '(') {
      ++pos;
      NodePtr inner = parse_sum();
      if (!eat(')')) fail("missing ')'");
      return inner;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t end = pos;
      while (end < s.size() &&
             (std::isalnum(static_cast<unsigned char>(s[end])) || s[end] == '_'))
        ++end;
      const std::string name = s.substr(pos, end - pos);
      pos = end;
      if (name == "x" || name == "x1") return make(Kind::var1);
      if (name == "x2" || name == "y") return make(Kind::var2);
      if (name == "pi") {
        auto n = std::make_shared<Expression::Node>();
        n->kind = Kind::number;
        n->value = M_PI;
        return n;
      }
      if (name == "sin" || name == "cos" || name == "exp" || name == "abs") {
        if (!eat('(')) fail("expected '(' after " + name);
        NodePtr arg = parse_sum();
        if (!eat(')')) fail("missing ')'");
        auto n = std::make_shared<Expression::Node>();
        n->kind = Kind::call;
        n->fn = name;
        n->a = arg;
        return n;
      }
      fail("unknown identifier '" + name + "'");
    }
    fail("unexpected character");
  }
};

double eval_node(const Expression::Node& n, double x1, double x2) {
  switch (n.kind) {
    case Kind::number: return n.value;
    case Kind::var1: return x1;
    case Kind::var2: return x2;
    case Kind::add: return eval_node(*n.a, x1, x2) + eval_node(*n.b, x1, x2);
    case Kind::sub: return eval_node(*n.a, x1, x2) - eval_node(*n.b, x1, x2);
    case Kind::mul: return eval_node(*n.a, x1, x2) * eval_node(*n.b, x1, x2);
    case Kind::div: return eval_node(*n.a, x1, x2) / eval_node(*n.b, x1, x2);
    case Kind::pow: return std::pow(eval_node(*n.a, x1, x2), eval_node(*n.b, x1, x2));
    case Kind::neg: return -eval_node(*n.a, x1, x2);
    case Kind::call: {
      const double v = eval_node(*n.a, x1, x2);
      if (n.fn == "sin") return std::sin(v);
      if (n.fn == "cos") return std::cos(v);
      if (n.fn == "exp") return std::exp(v);
      return std::abs(v);
    }
  }
  return 0.0;
}

} // namespace

Expression Expression::parse(const std::string& text) {
  Parser p(text);
  Expression e;
  e.root_ = p.parse_sum();
  p.skip();
  if (p.pos != text.size()) p.fail("trailing input");
  return e;
}

double Expression::eval(double x1, double x2) const {
  if (!root_) throw std::logic_error("expression: empty");
  return eval_node(*root_, x1, x2);
}

GridFunction Expression::sample(const GridPtr& grid, GridFunction::Trace tr) const {
  GridFunction f(grid, 0.0, tr);
  if (grid->dim == 1) {
    for (int i = 0; i < grid->n[0]; ++i) f[i] = eval(grid->coord(0, i));
  } else {
    for (int j = 0; j < grid->n[1]; ++j)
      for (int i = 0; i < grid->n[0]; ++i)
        f[grid->index(i, j)] = eval(grid->coord(0, i), grid->coord(1, j));
  }
  return f;
}

} // namespace nsoc
