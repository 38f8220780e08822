#include "polyfk/fields.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "polyfk/errors.hpp"

namespace polyfk {

// --- expression parser --------------------------------------------------

struct Expression::Node {
  enum class Op {
    value,
    var_x,
    var_y,
    var_t,
    add,
    sub,
    mul,
    div,
    pow,
    neg,
    fn1,
    fn2,
  };
  Op op = Op::value;
  double value = 0.0;
  double (*f1)(double) = nullptr;
  double (*f2)(double, double) = nullptr;
  std::shared_ptr<const Node> a, b;

  double eval(double x, double y, double t) const {
    switch (op) {
    case Op::value:
      return value;
    case Op::var_x:
      return x;
    case Op::var_y:
      return y;
    case Op::var_t:
      return t;
    case Op::add:
      return a->eval(x, y, t) + b->eval(x, y, t);
    case Op::sub:
      return a->eval(x, y, t) - b->eval(x, y, t);
    case Op::mul:
      return a->eval(x, y, t) * b->eval(x, y, t);
    case Op::div:
      return a->eval(x, y, t) / b->eval(x, y, t);
    case Op::pow:
      return std::pow(a->eval(x, y, t), b->eval(x, y, t));
    case Op::neg:
      return -a->eval(x, y, t);
    case Op::fn1:
      return f1(a->eval(x, y, t));
    case Op::fn2:
      return f2(a->eval(x, y, t), b->eval(x, y, t));
    }
    return 0.0;
  }
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;
using Node = Expression::Node;

struct ExprParser {
  const std::string &src;
  std::size_t pos = 0;
  bool uses_t = false;

  [[noreturn]] void fail(const std::string &msg) const {
    throw ParseError("expression '" + src + "': " + msg + " at position " + std::to_string(pos));
  }

  void skip_ws() {
    while (pos < src.size() && std::isspace(static_cast<unsigned char>(src[pos])))
      ++pos;
  }

  bool eat(char c) {
    skip_ws();
    if (pos < src.size() && src[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }

  char peek() {
    skip_ws();
    return pos < src.size() ? src[pos] : '\0';
  }

  static std::shared_ptr<Node> make(Node::Op op, NodePtr a = nullptr, NodePtr b = nullptr) {
    auto n = std::make_shared<Node>();
    n->op = op;
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
  }

  static NodePtr make_value(double v) {
    auto n = std::make_shared<Node>();
    n->op = Node::Op::value;
    n->value = v;
    return n;
  }

  NodePtr parse_expr() {
    NodePtr lhs = parse_term();
    while (true) {
      if (eat('+'))
        lhs = make(Node::Op::add, lhs, parse_term());
      else if (eat('-'))
        lhs = make(Node::Op::sub, lhs, parse_term());
      else
        return lhs;
    }
  }

  NodePtr parse_term() {
    NodePtr lhs = parse_unary();
    while (true) {
      if (eat('*'))
        lhs = make(Node::Op::mul, lhs, parse_unary());
      else if (eat('/'))
        lhs = make(Node::Op::div, lhs, parse_unary());
      else
        return lhs;
    }
  }

  NodePtr parse_unary() {
    if (eat('-'))
      return make(Node::Op::neg, parse_unary());
    if (eat('+'))
      return parse_unary();
    return parse_power();
  }

  NodePtr parse_power() {
    NodePtr base = parse_primary();
    if (eat('^'))
      return make(Node::Op::pow, base, parse_unary()); // right-associative
    return base;
  }

  NodePtr parse_primary() {
    skip_ws();
    if (pos >= src.size())
      fail("unexpected end of input");
    const char c = src[pos];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(src.substr(pos), &used);
      } catch (const std::exception &) {
        fail("malformed number");
      }
      pos += used;
      return make_value(v);
    }
    if (c == '(') {
      ++pos;
      NodePtr inner = parse_expr();
      if (!eat(')'))
        fail("missing ')'");
      return inner;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t end = pos;
      while (end < src.size() &&
             (std::isalnum(static_cast<unsigned char>(src[end])) || src[end] == '_'))
        ++end;
      const std::string name = src.substr(pos, end - pos);
      pos = end;
      if (name == "x")
        return make(Node::Op::var_x);
      if (name == "y")
        return make(Node::Op::var_y);
      if (name == "t") {
        uses_t = true;
        return make(Node::Op::var_t);
      }
      if (name == "pi")
        return make_value(M_PI);
      if (name == "e")
        return make_value(M_E);

      static const std::map<std::string, double (*)(double)> fn1 = {
          {"sin", std::sin},   {"cos", std::cos},   {"tan", std::tan},
          {"sinh", std::sinh}, {"cosh", std::cosh}, {"tanh", std::tanh},
          {"exp", std::exp},   {"log", std::log},   {"sqrt", std::sqrt},
          {"abs", std::fabs},
      };
      static const std::map<std::string, double (*)(double, double)> fn2 = {
          {"pow", std::pow},
          {"min", [](double a, double b) { return std::min(a, b); }},
          {"max", [](double a, double b) { return std::max(a, b); }},
          {"atan2", std::atan2},
      };

      if (!eat('('))
        fail("unknown identifier '" + name + "'");
      if (auto it = fn1.find(name); it != fn1.end()) {
        NodePtr arg = parse_expr();
        if (!eat(')'))
          fail("missing ')' after " + name);
        auto n = make(Node::Op::fn1, arg);
        n->f1 = it->second;
        return n;
      }
      if (auto it = fn2.find(name); it != fn2.end()) {
        NodePtr a = parse_expr();
        if (!eat(','))
          fail("expected ',' in " + name);
        NodePtr b = parse_expr();
        if (!eat(')'))
          fail("missing ')' after " + name);
        auto n = make(Node::Op::fn2, a, b);
        n->f2 = it->second;
        return n;
      }
      fail("unknown function '" + name + "'");
    }
    fail(std::string("unexpected character '") + c + "'");
  }
};

} // namespace

Expression Expression::parse(const std::string &text) {
  ExprParser parser{text};
  Expression e;
  e.root_ = parser.parse_expr();
  parser.skip_ws();
  if (parser.pos != text.size())
    parser.fail("trailing input");
  e.text_ = text;
  e.uses_t_ = parser.uses_t;
  return e;
}

double Expression::operator()(double x, double y, double t) const {
  return root_->eval(x, y, t);
}

ScalarField expression_field(const std::string &text) {
  Expression e = Expression::parse(text);
  return [e](const Point2 &p, double t) { return e(p.x, p.y, t); };
}

// --- FieldSpec ------------------------------------------------------------

FieldSpec FieldSpec::constant(double v) {
  FieldSpec s;
  s.kind = Kind::constant;
  s.value = v;
  return s;
}

FieldSpec FieldSpec::expression(const std::string &text) {
  FieldSpec s;
  s.kind = Kind::expression;
  s.expr_text = text;
  s.compiled_ = Expression::parse(text);
  s.compiled_valid_ = true;
  return s;
}

FieldSpec FieldSpec::per_element(std::vector<double> values) {
  FieldSpec s;
  s.kind = Kind::table;
  s.table = std::move(values);
  return s;
}

FieldSpec FieldSpec::parse(const std::string &text) {
  std::istringstream probe(text);
  double v = 0.0;
  char trailing = 0;
  if (probe >> v && !(probe >> trailing))
    return constant(v);
  return expression(text);
}

double FieldSpec::eval(const Point2 &p, double t, int element) const {
  switch (kind) {
  case Kind::constant:
    return value;
  case Kind::expression:
    return compiled_(p.x, p.y, t);
  case Kind::table:
    if (element < 0 || element >= static_cast<int>(table.size()))
      throw ContractViolation("per-element field: element id " + std::to_string(element) +
                              " outside table");
    return table[element];
  }
  return 0.0;
}

bool FieldSpec::references_time() const {
  return kind == Kind::expression && compiled_.references_time();
}

ScalarField FieldSpec::bind(const std::function<int(const Point2 &)> &locate) const {
  if (kind == Kind::table) {
    if (!locate)
      throw ContractViolation("per-element field needs an element locator to bind");
    const FieldSpec copy = *this;
    return [copy, locate](const Point2 &p, double t) { return copy.eval(p, t, locate(p)); };
  }
  const FieldSpec copy = *this;
  return [copy](const Point2 &p, double t) { return copy.eval(p, t, -1); };
}

// --- tables ----------------------------------------------------------------

namespace {

std::ifstream open_table(const std::string &path, int &count) {
  std::ifstream in(path);
  if (!in)
    throw ParseError("cannot open field table '" + path + "'");
  std::string w1, w2;
  if (!(in >> w1 >> w2 >> count) || w1 != "field" || w2 != "per-element" || count < 0)
    throw ParseError(path + ": expected header 'field per-element N'");
  return in;
}

} // namespace

std::vector<double> load_scalar_table(const std::string &path) {
  int count = 0;
  std::ifstream in = open_table(path, count);
  std::vector<double> values(count);
  for (int i = 0; i < count; ++i)
    if (!(in >> values[i]))
      throw ParseError(path + ": expected " + std::to_string(count) + " scalar values");
  return values;
}

std::vector<Point2> load_vector_table(const std::string &path) {
  int count = 0;
  std::ifstream in = open_table(path, count);
  std::vector<Point2> values(count);
  for (int i = 0; i < count; ++i)
    if (!(in >> values[i].x >> values[i].y))
      throw ParseError(path + ": expected " + std::to_string(count) + " value pairs");
  return values;
}

} // namespace polyfk
