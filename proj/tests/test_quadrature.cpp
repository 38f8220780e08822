#include <doctest.h>

#include <cmath>
#include <random>

#include "oracle.hpp"
#include "polyfk/quadrature.hpp"

using namespace polyfk;

TEST_CASE("gauss-legendre nodes integrate monomials exactly") {
  for (int n = 1; n <= 12; ++n) {
    const auto rule = gauss_legendre_01(n);
    for (int k = 0; k <= 2 * n - 1; ++k) {
      double q = 0.0;
      for (const auto &[x, w] : rule)
        q += w * std::pow(x, k);
      CHECK(q == doctest::Approx(1.0 / (k + 1)).epsilon(1e-13));
    }
  }
}

TEST_CASE("element rule weights are positive and sum to the area") {
  const PolyMesh m = generate_cartesian_mesh({0, 0, 1, 1}, 1, 1);
  const SubTriangulation sub = sub_triangulate(m);
  const QuadratureRule rule = element_quadrature(m, sub, 0, 1);
  for (double w : rule.weights)
    CHECK(w > 0.0);
  CHECK(rule.weight_sum() == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("xy over the unit square") {
  const PolyMesh m = generate_cartesian_mesh({0, 0, 1, 1}, 1, 1);
  const SubTriangulation sub = sub_triangulate(m);
  const QuadratureRule rule = element_quadrature(m, sub, 0, 2);
  double q = 0.0;
  for (int i = 0; i < rule.size(); ++i)
    q += rule.weights[i] * rule.points[i].x * rule.points[i].y;
  CHECK(q == doctest::Approx(0.25).epsilon(1e-14));
}

TEST_CASE("random polynomials over a pentagon match Green's theorem") {
  PolyMesh pent;
  pent.vertices = {{0, 0}, {1, 0}, {1.3, 0.8}, {0.5, 1.4}, {-0.3, 0.8}};
  pent.elements = {{0, 1, 2, 3, 4}};
  pent.finalize(tag_all_dirichlet);
  const SubTriangulation sub = sub_triangulate(pent);
  const auto loop = pent.element_loop(0);

  std::mt19937_64 rng(314);
  std::uniform_real_distribution<double> coeff(-1.0, 1.0);
  for (int p = 1; p <= 5; ++p) {
    const int degree = 2 * p;
    const QuadratureRule rule = element_quadrature(pent, sub, 0, degree);
    double quad = 0.0, exact = 0.0;
    for (int a = 0; a <= degree; ++a)
      for (int b = 0; a + b <= degree; ++b) {
        const double c = coeff(rng);
        exact += c * oracle::polygon_monomial(loop, a, b);
        for (int i = 0; i < rule.size(); ++i)
          quad += c * rule.weights[i] * std::pow(rule.points[i].x, a) *
                  std::pow(rule.points[i].y, b);
      }
    CHECK(quad == doctest::Approx(exact).epsilon(1e-12));
  }
}

TEST_CASE("face rule basics") {
  PolyMesh m = generate_cartesian_mesh({0, 0, 1, 1}, 1, 1);
  // Bottom edge is a unit segment.
  int bottom = -1;
  for (int f = 0; f < m.n_faces(); ++f) {
    const Point2 mid = 0.5 * (m.vertices[m.faces[f].vertices[0]] +
                              m.vertices[m.faces[f].vertices[1]]);
    if (mid.y == 0.0)
      bottom = f;
  }
  REQUIRE(bottom >= 0);

  const QuadratureRule one = face_quadrature(m, m.faces[bottom], 1);
  REQUIRE(one.size() == 1);
  CHECK(one.weights[0] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(one.points[0].x == doctest::Approx(0.5).epsilon(1e-14));

  const QuadratureRule two = face_quadrature(m, m.faces[bottom], 3);
  REQUIRE(two.size() == 2);
  double q = 0.0;
  for (int i = 0; i < two.size(); ++i)
    q += two.weights[i] * std::pow(two.points[i].x, 3);
  CHECK(q == doctest::Approx(0.25).epsilon(1e-14));
}

TEST_CASE("random polynomial over a slanted segment matches the antiderivative") {
  PolyMesh m;
  m.vertices = {{0.2, -0.1}, {1.1, 0.7}, {0.0, 1.0}};
  m.elements = {{0, 1, 2}};
  m.finalize(tag_all_dirichlet);
  const Face &face = m.faces[0];
  const Point2 a = m.vertices[face.vertices[0]];
  const Point2 b = m.vertices[face.vertices[1]];

  std::mt19937_64 rng(2718);
  std::uniform_real_distribution<double> coeff(-1.0, 1.0);
  for (int p = 1; p <= 6; ++p) {
    const int degree = 2 * p + 1;
    std::vector<std::pair<std::pair<int, int>, double>> poly;
    for (int ax = 0; ax <= degree; ++ax)
      for (int by = 0; ax + by <= degree; ++by)
        poly.push_back({{ax, by}, coeff(rng)});

    // Trace along the segment expanded into coefficients of the parameter s,
    // integrated coefficient-wise (the symbolic antiderivative).
    std::vector<double> s_coeffs(2 * degree + 2, 0.0);
    auto binom = [](int n, int k) {
      double r = 1.0;
      for (int i = 1; i <= k; ++i)
        r = r * (n - k + i) / i;
      return r;
    };
    for (const auto &[powers, c] : poly) {
      const auto [ax, by] = powers;
      // (a.x + s dx)^ax (a.y + s dy)^by
      std::vector<double> term(ax + by + 1, 0.0);
      for (int i = 0; i <= ax; ++i)
        for (int j = 0; j <= by; ++j)
          term[i + j] += binom(ax, i) * std::pow(a.x, ax - i) * std::pow(b.x - a.x, i) *
                         binom(by, j) * std::pow(a.y, by - j) * std::pow(b.y - a.y, j);
      for (std::size_t k = 0; k < term.size(); ++k)
        s_coeffs[k] += c * term[k];
    }
    double exact = 0.0;
    for (std::size_t k = 0; k < s_coeffs.size(); ++k)
      exact += s_coeffs[k] / (k + 1.0);
    exact *= face.length; // ds measure

    const QuadratureRule rule = face_quadrature(m, face, degree);
    double quad = 0.0;
    for (int i = 0; i < rule.size(); ++i) {
      double v = 0.0;
      for (const auto &[powers, c] : poly)
        v += c * std::pow(rule.points[i].x, powers.first) *
             std::pow(rule.points[i].y, powers.second);
      quad += rule.weights[i] * v;
    }
    CHECK(quad == doctest::Approx(exact).epsilon(1e-13));
  }
}

TEST_CASE("composite rules stay exact on agglomerated cells") {
  const PolyMesh fine = generate_voronoi_mesh({0, 0, 1, 1}, 30, 100, 42);
  const PolyMesh coarse = agglomerate(fine, 5, 7);
  const SubTriangulation sub = sub_triangulate(coarse);
  for (int k = 0; k < coarse.n_elements(); ++k) {
    const QuadratureRule rule = element_quadrature(coarse, sub, k, 4);
    double q = 0.0, exact = oracle::polygon_monomial(coarse.element_loop(k), 2, 2);
    for (int i = 0; i < rule.size(); ++i)
      q += rule.weights[i] * rule.points[i].x * rule.points[i].x * rule.points[i].y *
           rule.points[i].y;
    CHECK(q == doctest::Approx(exact).epsilon(1e-12));
  }
}
