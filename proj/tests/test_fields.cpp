#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>

#include "polyfk/errors.hpp"
#include "polyfk/fields.hpp"

using namespace polyfk;

TEST_CASE("expression evaluation and precedence") {
  CHECK(Expression::parse("1 + 2*3")(0, 0, 0) == doctest::Approx(7.0));
  CHECK(Expression::parse("(1 + 2)*3")(0, 0, 0) == doctest::Approx(9.0));
  CHECK(Expression::parse("2^3^2")(0, 0, 0) == doctest::Approx(512.0)); // right-assoc
  CHECK(Expression::parse("-x^2")(3, 0, 0) == doctest::Approx(-9.0));
  CHECK(Expression::parse("2*pi")(0, 0, 0) == doctest::Approx(2 * M_PI));
  CHECK(Expression::parse("cos(pi*x)*cos(pi*y)+2")(0.5, 1.0, 0) == doctest::Approx(2.0 - 0.0));
  CHECK(Expression::parse("exp(-t)")(0, 0, 2.0) == doctest::Approx(std::exp(-2.0)));
  CHECK(Expression::parse("min(x, y) + max(x, y)")(3, 5, 0) == doctest::Approx(8.0));
  CHECK(Expression::parse("pow(x, 3)")(2, 0, 0) == doctest::Approx(8.0));
  CHECK(Expression::parse("sqrt(abs(-9))")(0, 0, 0) == doctest::Approx(3.0));
}

TEST_CASE("expression error reporting") {
  CHECK_THROWS_AS(Expression::parse("1 +"), ParseError);
  CHECK_THROWS_AS(Expression::parse("foo(3)"), ParseError);
  CHECK_THROWS_AS(Expression::parse("x y"), ParseError);
  CHECK_THROWS_AS(Expression::parse("(x"), ParseError);
  CHECK_THROWS_AS(Expression::parse("z + 1"), ParseError);
}

TEST_CASE("time-dependence detection") {
  CHECK(Expression::parse("x + t").references_time());
  CHECK_FALSE(Expression::parse("x + y").references_time());
  CHECK_FALSE(FieldSpec::constant(3.0).references_time());
  CHECK(FieldSpec::expression("exp(-t)").references_time());
}

TEST_CASE("field spec parse picks constants vs expressions") {
  const FieldSpec c = FieldSpec::parse("8");
  CHECK(c.kind == FieldSpec::Kind::constant);
  CHECK(c.eval({0, 0}, 0, -1) == 8.0);
  const FieldSpec e = FieldSpec::parse("8*x");
  CHECK(e.kind == FieldSpec::Kind::expression);
  CHECK(e.eval({2, 0}, 0, -1) == doctest::Approx(16.0));
}

TEST_CASE("per-element tables") {
  const std::string path = "fields_table_test.txt";
  {
    std::ofstream out(path);
    out << "field per-element 3\n1.5\n2.5\n3.5\n";
  }
  const std::vector<double> t = load_scalar_table(path);
  REQUIRE(t.size() == 3);
  CHECK(t[1] == 2.5);

  const FieldSpec spec = FieldSpec::per_element(t);
  CHECK(spec.eval({0, 0}, 0, 2) == 3.5);
  CHECK_THROWS_AS(spec.eval({0, 0}, 0, 5), ContractViolation);
  std::remove(path.c_str());
}

TEST_CASE("table file validation") {
  const std::string path = "fields_bad_table.txt";
  {
    std::ofstream out(path);
    out << "field per-element 4\n1.0\n2.0\n";
  }
  CHECK_THROWS_AS(load_scalar_table(path), ParseError);
  CHECK_THROWS_AS(load_scalar_table("does_not_exist.txt"), ParseError);
  std::remove(path.c_str());
}

TEST_CASE("vector tables normalize on load via FiberField") {
  const std::string path = "fields_vec_table.txt";
  {
    std::ofstream out(path);
    out << "field per-element 2\n1 0\n0.5 0.5\n";
  }
  const std::vector<Point2> t = load_vector_table(path);
  REQUIRE(t.size() == 2);
  CHECK(t[1].x == 0.5);
  std::remove(path.c_str());
}
