#include <doctest.h>

#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "polyfk/errors.hpp"
#include "polyfk/mesh.hpp"

using namespace polyfk;

namespace {

const Rect unit_square{0, 0, 1, 1};

int count_boundary(const PolyMesh &m) {
  int n = 0;
  for (const Face &f : m.faces)
    n += f.is_boundary() ? 1 : 0;
  return n;
}

} // namespace

TEST_CASE("cartesian 1x1 is the unit square") {
  const PolyMesh m = generate_cartesian_mesh(unit_square, 1, 1);
  CHECK(m.n_elements() == 1);
  CHECK(m.n_faces() == 4);
  CHECK(count_boundary(m) == 4);
  CHECK(m.element_areas[0] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(m.element_diameters[0] == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
}

TEST_CASE("cartesian 2x1 has one interior face of length 1") {
  const PolyMesh m = generate_cartesian_mesh(unit_square, 2, 1);
  CHECK(m.n_elements() == 2);
  int interior = 0;
  for (const Face &f : m.faces)
    if (!f.is_boundary()) {
      ++interior;
      CHECK(f.length == doctest::Approx(1.0).epsilon(1e-14));
    }
  CHECK(interior == 1);
}

TEST_CASE("cartesian 10x2 on (0,5)x(0,1)") {
  const PolyMesh m = generate_cartesian_mesh({0, 0, 5, 1}, 10, 2);
  CHECK(m.n_elements() == 20);
  const double h = std::sqrt(0.5 * 0.5 + 0.5 * 0.5);
  for (double hk : m.element_diameters)
    CHECK(hk == doctest::Approx(h).epsilon(1e-14));
}

TEST_CASE("interior face normals point from plus into minus") {
  const PolyMesh m = generate_cartesian_mesh(unit_square, 3, 3);
  for (const Face &f : m.faces) {
    CHECK(norm(f.normal) == doctest::Approx(1.0).epsilon(1e-14));
    if (!f.is_boundary()) {
      const Point2 d = m.element_centroid(f.element_minus) - m.element_centroid(f.element_plus);
      CHECK(dot(f.normal, d) > 0.0);
    }
  }
}

TEST_CASE("voronoi with one seed returns the domain") {
  const PolyMesh m = generate_voronoi_mesh(unit_square, 1, 0, 7);
  CHECK(m.n_elements() == 1);
  CHECK(m.total_area() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(m.vertices.size() == 4);
}

TEST_CASE("voronoi of four symmetric seeds is the 2x2 grid") {
  const std::vector<Point2> seeds = {
      {0.25, 0.25}, {0.75, 0.25}, {0.25, 0.75}, {0.75, 0.75}};
  const PolyMesh m = voronoi_mesh_from_seeds(unit_square, seeds, 0);
  REQUIRE(m.n_elements() == 4);
  for (int k = 0; k < 4; ++k) {
    CHECK(m.element_areas[k] == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(m.elements[k].size() == 4);
  }
}

TEST_CASE("voronoi 30 cells: area closes and cells are convex") {
  const PolyMesh m = generate_voronoi_mesh(unit_square, 30, 100, 42);
  REQUIRE(m.n_elements() == 30);
  CHECK(std::abs(m.total_area() - 1.0) <= 1e-12);
  for (int k = 0; k < m.n_elements(); ++k)
    CHECK(polygon_is_convex(m.element_loop(k)));
}

TEST_CASE("voronoi generation is deterministic for a fixed seed") {
  const PolyMesh a = generate_voronoi_mesh(unit_square, 25, 20, 9);
  const PolyMesh b = generate_voronoi_mesh(unit_square, 25, 20, 9);
  REQUIRE(a.vertices.size() == b.vertices.size());
  for (std::size_t i = 0; i < a.vertices.size(); ++i) {
    CHECK(a.vertices[i].x == b.vertices[i].x);
    CHECK(a.vertices[i].y == b.vertices[i].y);
  }
  CHECK(a.elements == b.elements);
}

TEST_CASE("face incidence bookkeeping") {
  const PolyMesh m = generate_voronoi_mesh(unit_square, 30, 100, 42);
  std::size_t edge_uses = 0;
  for (const auto &el : m.elements)
    edge_uses += el.size();
  int interior = 0, boundary = 0;
  for (const Face &f : m.faces)
    (f.is_boundary() ? boundary : interior)++;
  CHECK(edge_uses == 2u * interior + boundary);
}

TEST_CASE("degenerate domain is rejected") {
  CHECK_THROWS_AS(generate_voronoi_mesh({0, 0, 0, 1}, 5, 0, 1), ParseError);
  CHECK_THROWS_AS(generate_cartesian_mesh({0, 0, 1, 0}, 2, 2), ParseError);
}

TEST_CASE("mesh file loads a unit quad identical to the generator") {
  std::istringstream in(R"(polymesh 2d
# a single quad
vertices 4
0 0
1 0
1 1
0 1
elements 1
4 0 1 2 3
boundary 4
0 1 dirichlet
1 2 dirichlet
2 3 dirichlet
3 0 dirichlet
)");
  const PolyMesh m = load_mesh(in, "inline");
  const PolyMesh ref = generate_cartesian_mesh(unit_square, 1, 1);
  CHECK(m.vertices.size() == ref.vertices.size());
  CHECK(m.n_faces() == ref.n_faces());
  CHECK(m.total_area() == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("clockwise element is reported with its id") {
  std::istringstream in(R"(polymesh 2d
vertices 4
0 0
1 0
1 1
0 1
elements 1
4 0 3 2 1
boundary 4
0 1 dirichlet
1 2 dirichlet
2 3 dirichlet
3 0 dirichlet
)");
  try {
    load_mesh(in, "inline");
    FAIL("expected TopologyError");
  } catch (const TopologyError &err) {
    CHECK(std::string(err.what()).find("element 0") != std::string::npos);
  }
}

TEST_CASE("parse errors carry line numbers") {
  std::istringstream in("polymesh 2d\nvertices 2\n0 0\n");
  try {
    load_mesh(in, "broken");
    FAIL("expected ParseError");
  } catch (const ParseError &err) {
    CHECK(std::string(err.what()).find("broken:") != std::string::npos);
  }
}

TEST_CASE("untagged boundary face is a topology error") {
  std::istringstream in(R"(polymesh 2d
vertices 4
0 0
1 0
1 1
0 1
elements 1
4 0 1 2 3
boundary 3
0 1 dirichlet
1 2 dirichlet
2 3 dirichlet
)");
  CHECK_THROWS_AS(load_mesh(in, "inline"), TopologyError);
}

TEST_CASE("save/load round-trip preserves the mesh structurally") {
  const PolyMesh m = generate_voronoi_mesh(unit_square, 30, 100, 42);
  std::ostringstream out;
  save_mesh(m, out);
  std::istringstream in(out.str());
  const PolyMesh r = load_mesh(in, "roundtrip");
  REQUIRE(r.vertices.size() == m.vertices.size());
  for (std::size_t i = 0; i < m.vertices.size(); ++i) {
    CHECK(r.vertices[i].x == m.vertices[i].x);
    CHECK(r.vertices[i].y == m.vertices[i].y);
  }
  CHECK(r.elements == m.elements);
  REQUIRE(r.n_faces() == m.n_faces());
  for (int f = 0; f < m.n_faces(); ++f)
    CHECK(r.faces[f].kind == m.faces[f].kind);
}

TEST_CASE("agglomerate to the identity partition") {
  const PolyMesh fine = generate_voronoi_mesh(unit_square, 12, 40, 3);
  const PolyMesh coarse = agglomerate(fine, fine.n_elements(), 5);
  CHECK(coarse.n_elements() == fine.n_elements());
  CHECK(coarse.total_area() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("agglomerate 2x2 into one element gives the square back") {
  const PolyMesh fine = generate_cartesian_mesh(unit_square, 2, 2);
  const PolyMesh coarse = agglomerate(fine, 1, 1);
  REQUIRE(coarse.n_elements() == 1);
  CHECK(coarse.element_areas[0] == doctest::Approx(1.0).epsilon(1e-14));
  // All fine boundary segments survive as separate faces.
  CHECK(coarse.n_faces() == 8);
}

TEST_CASE("agglomerate 30 cells into 5 connected parts") {
  const PolyMesh fine = generate_voronoi_mesh(unit_square, 30, 100, 42);
  const PolyMesh coarse = agglomerate(fine, 5, 7);
  REQUIRE(coarse.n_elements() == 5);
  CHECK(std::abs(coarse.total_area() - 1.0) <= 1e-12);

  // Boundary tag multiset is preserved exactly.
  std::map<FaceKind, int> fine_tags, coarse_tags;
  for (const Face &f : fine.faces)
    if (f.is_boundary())
      fine_tags[f.kind]++;
  for (const Face &f : coarse.faces)
    if (f.is_boundary())
      coarse_tags[f.kind]++;
  CHECK(fine_tags == coarse_tags);
}

TEST_CASE("agglomerate input validation") {
  const PolyMesh fine = generate_cartesian_mesh(unit_square, 2, 2);
  CHECK_THROWS_AS(agglomerate(fine, 5, 1), ParseError);
  CHECK_THROWS_AS(agglomerate(fine, 0, 1), ParseError);
}

TEST_CASE("sub-triangulation covers squares and pentagons") {
  const PolyMesh m = generate_cartesian_mesh(unit_square, 1, 1);
  const SubTriangulation sub = sub_triangulate(m);
  CHECK((sub.triangles[0].size() == 2 || sub.triangles[0].size() == 4));
  double area = 0.0;
  for (const auto &t : sub.triangles[0])
    area += 0.5 * cross(t[1] - t[0], t[2] - t[0]);
  CHECK(area == doctest::Approx(1.0).epsilon(1e-14));

  PolyMesh pent;
  pent.vertices = {{0, 0}, {1, 0}, {1.3, 0.8}, {0.5, 1.4}, {-0.3, 0.8}};
  pent.elements = {{0, 1, 2, 3, 4}};
  pent.finalize(tag_all_dirichlet);
  const SubTriangulation psub = sub_triangulate(pent);
  CHECK(psub.triangles[0].size() == 5); // centroid fan on a convex pentagon
  double parea = 0.0;
  for (const auto &t : psub.triangles[0]) {
    const double a = 0.5 * cross(t[1] - t[0], t[2] - t[0]);
    CHECK(a > 0.0);
    parea += a;
  }
  CHECK(parea == doctest::Approx(pent.element_areas[0]).epsilon(1e-13));
}

TEST_CASE("ear clipping covers an L-shaped element") {
  PolyMesh m;
  m.vertices = {{0, 0}, {2, 0}, {2, 1}, {1, 1}, {1, 2}, {0, 2}};
  m.elements = {{0, 1, 2, 3, 4, 5}};
  m.finalize(tag_all_dirichlet);
  const SubTriangulation sub = sub_triangulate(m);
  double area = 0.0;
  for (const auto &t : sub.triangles[0]) {
    const double a = 0.5 * cross(t[1] - t[0], t[2] - t[0]);
    CHECK(a > 0.0);
    area += a;
  }
  CHECK(area == doctest::Approx(3.0).epsilon(1e-13));
}

TEST_CASE("agglomerated non-convex elements sub-triangulate cleanly") {
  const PolyMesh fine = generate_voronoi_mesh(unit_square, 30, 100, 42);
  const PolyMesh coarse = agglomerate(fine, 5, 7);
  const SubTriangulation sub = sub_triangulate(coarse);
  for (int k = 0; k < coarse.n_elements(); ++k) {
    double area = 0.0;
    for (const auto &t : sub.triangles[k])
      area += 0.5 * cross(t[1] - t[0], t[2] - t[0]);
    CHECK(area == doctest::Approx(coarse.element_areas[k]).epsilon(1e-12));
  }
}

TEST_CASE("regularity report") {
  const PolyMesh single = generate_cartesian_mesh(unit_square, 1, 1);
  const RegularityReport r1 = check_regularity(single);
  CHECK(r1.shape_min == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(r1.shape_max == doctest::Approx(0.5).epsilon(1e-14));

  const RegularityReport r2 = check_regularity(generate_cartesian_mesh(unit_square, 2, 2));
  CHECK(r2.shape_min == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(r2.shape_max == doctest::Approx(0.5).epsilon(1e-14));

  const RegularityReport r3 = check_regularity(generate_voronoi_mesh(unit_square, 30, 100, 42));
  CHECK(r3.shape_min > 0.0);
  CHECK(std::isfinite(r3.shape_max));
  CHECK(r3.contact_min > 0.0);
  CHECK(std::isfinite(r3.contact_max));
}
