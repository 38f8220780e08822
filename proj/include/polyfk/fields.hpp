#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "polyfk/geometry.hpp"

namespace polyfk {

// Scalar coefficient field over space and time.
using ScalarField = std::function<double(const Point2 &, double)>;
using VectorField = std::function<Point2(const Point2 &, double)>;

inline ScalarField constant_field(double v) {
  return [v](const Point2 &, double) { return v; };
}

// Compiled closed-form expression over (x, y, t). Supported: numbers,
// x y t pi e, + - * / ^, parentheses, unary minus, and the functions
// sin cos tan sinh cosh tanh exp log sqrt abs, pow/min/max/atan2 with
// two arguments. Evaluation is deterministic and total (IEEE semantics).
class Expression {
public:
  static Expression parse(const std::string &text);

  double operator()(double x, double y, double t) const;
  const std::string &text() const { return text_; }
  bool references_time() const { return uses_t_; }

  struct Node;

private:
  std::shared_ptr<const Node> root_;
  std::string text_;
  bool uses_t_ = false;
};

ScalarField expression_field(const std::string &text);

// One of: constant | expression | per-element constant table. The table
// variant resolves through the element id supplied at evaluation sites.
struct FieldSpec {
  enum class Kind { constant, expression, table };
  Kind kind = Kind::constant;
  double value = 0.0;
  std::string expr_text;
  std::vector<double> table; // per element id

  static FieldSpec constant(double v);
  static FieldSpec expression(const std::string &text);
  static FieldSpec per_element(std::vector<double> values);

  // Parses either a number or an expression.
  static FieldSpec parse(const std::string &text);

  double eval(const Point2 &p, double t, int element) const;
  bool references_time() const;
  ScalarField bind(const std::function<int(const Point2 &)> &locate = nullptr) const;

private:
  Expression compiled_;
  bool compiled_valid_ = false;
};

// Text file `field per-element N` followed by N scalar lines (or pairs for
// vector fields), indexed by element id.
std::vector<double> load_scalar_table(const std::string &path);
std::vector<Point2> load_vector_table(const std::string &path);

} // namespace polyfk
