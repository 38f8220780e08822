#include "polyfk/snapshot.hpp"

#include <fstream>
#include <map>
#include <vector>

#include "polyfk/errors.hpp"

namespace polyfk {

void write_snapshot(const DgSpace &space, const SubTriangulation &sub, const StateVector &C,
                    double t, const std::string &path) {
  const PolyMesh &mesh = space.mesh();

  std::vector<Point2> points;
  std::vector<double> values;
  std::vector<std::array<int, 3>> cells;
  for (int k = 0; k < mesh.n_elements(); ++k) {
    // Element-local welding only: duplicates across elements are kept.
    std::map<std::pair<double, double>, int> local;
    for (const auto &tri : sub.triangles[k]) {
      std::array<int, 3> cell{};
      for (int c = 0; c < 3; ++c) {
        const auto key = std::make_pair(tri[c].x, tri[c].y);
        auto it = local.find(key);
        if (it == local.end()) {
          it = local.emplace(key, static_cast<int>(points.size())).first;
          points.push_back(tri[c]);
          values.push_back(space.evaluate(k, tri[c], C));
        }
        cell[c] = it->second;
      }
      cells.push_back(cell);
    }
  }

  std::ofstream out(path);
  if (!out)
    throw ParseError("cannot write snapshot '" + path + "'");
  out.precision(17);
  out << "# vtk DataFile Version 3.0\n";
  out << "polyfk snapshot t=" << t << "\n";
  out << "ASCII\n";
  out << "DATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << points.size() << " double\n";
  for (const Point2 &p : points)
    out << p.x << " " << p.y << " 0\n";
  out << "CELLS " << cells.size() << " " << cells.size() * 4 << "\n";
  for (const auto &c : cells)
    out << "3 " << c[0] << " " << c[1] << " " << c[2] << "\n";
  out << "CELL_TYPES " << cells.size() << "\n";
  for (std::size_t i = 0; i < cells.size(); ++i)
    out << "5\n";
  out << "POINT_DATA " << points.size() << "\n";
  out << "SCALARS c double 1\n";
  out << "LOOKUP_TABLE default\n";
  for (double v : values)
    out << v << "\n";
  if (!out)
    throw ParseError("write failure on snapshot '" + path + "'");
}

} // namespace polyfk
