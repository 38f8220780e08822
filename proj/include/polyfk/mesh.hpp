#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "polyfk/geometry.hpp"

namespace polyfk {

enum class FaceKind : std::uint8_t { interior, dirichlet, neumann };

// Straight face (segment) of the polygonal mesh. Interior faces are shared
// by exactly two elements; the unit normal points from plus() into minus().
// Boundary faces belong to one element and the normal points outward.
struct Face {
  std::array<int, 2> vertices{-1, -1};
  Point2 normal{};
  double length = 0.0;
  int element_plus = -1;
  int element_minus = -1; // -1 on boundary faces
  FaceKind kind = FaceKind::interior;

  bool is_boundary() const { return element_minus < 0; }
};

// 2D polygonal mesh. Immutable after construction; element vertex loops are
// counter-clockwise simple polygons.
class PolyMesh {
public:
  std::vector<Point2> vertices;
  std::vector<std::vector<int>> elements;
  std::vector<Face> faces;
  std::vector<double> element_areas;
  std::vector<double> element_diameters;  // h_K = max pairwise vertex distance
  std::vector<std::vector<int>> element_faces;
  double mesh_size = 0.0; // h = max_K h_K

  int n_elements() const { return static_cast<int>(elements.size()); }
  int n_faces() const { return static_cast<int>(faces.size()); }

  std::vector<Point2> element_loop(int k) const;
  Point2 element_centroid(int k) const;
  Rect element_bbox(int k) const;
  double total_area() const;

  // Computes faces, areas, diameters and checks all structural invariants
  // (orientation, manifold faces, area closure against the boundary).
  // Boundary tagging is done by `classify` from the face midpoint.
  void finalize(const std::function<FaceKind(const Point2 &)> &classify);

  // Re-tags boundary faces only.
  void retag_boundary(const std::function<FaceKind(const Point2 &)> &classify);
};

struct SubTriangulation {
  // Per element: triangle vertex coordinates (centroid fans introduce points
  // that are not mesh vertices, so triangles are stored by coordinates).
  std::vector<std::vector<std::array<Point2, 3>>> triangles;
};

struct RegularityReport {
  double shape_min = 0.0, shape_max = 0.0;     // |K| / h_K^2
  double contact_min = 0.0, contact_max = 0.0; // |F| / h_K over adjacent K
};

// All-Dirichlet / all-Neumann conveniences for generator calls.
FaceKind tag_all_dirichlet(const Point2 &);
FaceKind tag_all_neumann(const Point2 &);

PolyMesh generate_cartesian_mesh(const Rect &domain, int nx, int ny,
                                 const std::function<FaceKind(const Point2 &)> &classify =
                                     tag_all_dirichlet);

// Lloyd-relaxed clipped Voronoi tessellation with uniform random seeds.
// Deterministic for a fixed seed.
PolyMesh generate_voronoi_mesh(const Rect &domain, int n_elements, int lloyd_iterations,
                               std::uint64_t seed,
                               const std::function<FaceKind(const Point2 &)> &classify =
                                     tag_all_dirichlet);

// Building block of generate_voronoi_mesh with caller-supplied generator points.
PolyMesh voronoi_mesh_from_seeds(const Rect &domain, std::vector<Point2> seeds,
                                 int lloyd_iterations,
                                 const std::function<FaceKind(const Point2 &)> &classify =
                                     tag_all_dirichlet);

PolyMesh load_mesh(const std::string &path);
PolyMesh load_mesh(std::istream &in, const std::string &name);
void save_mesh(const PolyMesh &mesh, const std::string &path);
void save_mesh(const PolyMesh &mesh, std::ostream &out);

// Greedy BFS-balanced agglomeration of the element adjacency graph into
// n_coarse connected polygonal unions. Fine boundary segments between two
// coarse cells stay separate Face records; boundary faces keep their tags.
PolyMesh agglomerate(const PolyMesh &fine, int n_coarse, std::uint64_t seed);

// Centroid fan on convex elements, ear clipping otherwise.
SubTriangulation sub_triangulate(const PolyMesh &mesh);

RegularityReport check_regularity(const PolyMesh &mesh);

} // namespace polyfk
