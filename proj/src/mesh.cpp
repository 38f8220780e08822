#include "polyfk/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <sstream>

#include "polyfk/errors.hpp"

namespace polyfk {

FaceKind tag_all_dirichlet(const Point2 &) { return FaceKind::dirichlet; }
FaceKind tag_all_neumann(const Point2 &) { return FaceKind::neumann; }

std::vector<Point2> PolyMesh::element_loop(int k) const {
  std::vector<Point2> loop;
  loop.reserve(elements[k].size());
  for (int v : elements[k])
    loop.push_back(vertices[v]);
  return loop;
}

Point2 PolyMesh::element_centroid(int k) const {
  const auto loop = element_loop(k);
  return polygon_centroid(loop);
}

Rect PolyMesh::element_bbox(int k) const {
  Rect b{std::numeric_limits<double>::max(), std::numeric_limits<double>::max(),
         std::numeric_limits<double>::lowest(), std::numeric_limits<double>::lowest()};
  for (int v : elements[k]) {
    b.x0 = std::min(b.x0, vertices[v].x);
    b.y0 = std::min(b.y0, vertices[v].y);
    b.x1 = std::max(b.x1, vertices[v].x);
    b.y1 = std::max(b.y1, vertices[v].y);
  }
  return b;
}

double PolyMesh::total_area() const {
  return std::accumulate(element_areas.begin(), element_areas.end(), 0.0);
}

void PolyMesh::finalize(const std::function<FaceKind(const Point2 &)> &classify) {
  const int n_el = n_elements();
  element_areas.assign(n_el, 0.0);
  element_diameters.assign(n_el, 0.0);
  mesh_size = 0.0;

  for (int k = 0; k < n_el; ++k) {
    if (elements[k].size() < 3)
      throw TopologyError("element " + std::to_string(k) + " has fewer than 3 vertices");
    const auto loop = element_loop(k);
    const double a = polygon_signed_area(loop);
    if (a <= 0.0)
      throw TopologyError("element " + std::to_string(k) +
                          " is not counter-clockwise (signed area " + std::to_string(a) + ")");
    element_areas[k] = a;
    element_diameters[k] = polygon_diameter(loop);
    mesh_size = std::max(mesh_size, element_diameters[k]);
  }

  // Match element edges into faces. An interior face must appear once per
  // orientation; anything else is non-manifold.
  struct EdgeUse {
    int element;
    int a, b;
  };
  std::map<std::pair<int, int>, std::vector<EdgeUse>> edge_map;
  for (int k = 0; k < n_el; ++k) {
    const auto &el = elements[k];
    const int m = static_cast<int>(el.size());
    for (int i = 0; i < m; ++i) {
      const int a = el[i];
      const int b = el[(i + 1) % m];
      if (a == b)
        throw TopologyError("element " + std::to_string(k) + " has a degenerate edge");
      edge_map[{std::min(a, b), std::max(a, b)}].push_back({k, a, b});
    }
  }

  faces.clear();
  faces.reserve(edge_map.size());
  for (const auto &[key, uses] : edge_map) {
    if (uses.size() > 2)
      throw TopologyError("non-manifold face between vertices " + std::to_string(key.first) +
                          " and " + std::to_string(key.second));
    Face f;
    const EdgeUse *plus = &uses[0];
    if (uses.size() == 2) {
      if (uses[0].a == uses[1].a)
        throw TopologyError("inconsistent orientation at face between elements " +
                            std::to_string(uses[0].element) + " and " +
                            std::to_string(uses[1].element));
      const EdgeUse *minus = &uses[1];
      if (minus->element < plus->element)
        std::swap(plus, minus);
      f.element_minus = minus->element;
      f.kind = FaceKind::interior;
    }
    f.element_plus = plus->element;
    f.vertices = {plus->a, plus->b};
    const Point2 d = vertices[plus->b] - vertices[plus->a];
    f.length = norm(d);
    if (f.length <= 0.0)
      throw TopologyError("zero-length face in element " + std::to_string(plus->element));
    f.normal = {d.y / f.length, -d.x / f.length};
    if (uses.size() == 1) {
      const Point2 mid = 0.5 * (vertices[plus->a] + vertices[plus->b]);
      f.kind = classify(mid);
      if (f.kind == FaceKind::interior)
        throw TopologyError("boundary face of element " + std::to_string(plus->element) +
                            " left untagged");
    }
    faces.push_back(f);
  }

  element_faces.assign(n_el, {});
  for (int i = 0; i < n_faces(); ++i) {
    element_faces[faces[i].element_plus].push_back(i);
    if (!faces[i].is_boundary())
      element_faces[faces[i].element_minus].push_back(i);
  }

  // Area closure: interior contributions to the divergence identity cancel,
  // so sum |K| must equal the Green integral over the tagged boundary.
  double boundary_area = 0.0;
  for (const Face &f : faces)
    if (f.is_boundary()) {
      const Point2 mid = 0.5 * (vertices[f.vertices[0]] + vertices[f.vertices[1]]);
      boundary_area += mid.x * f.normal.x * f.length;
    }
  const double total = total_area();
  if (std::abs(total - boundary_area) > 1e-12 * std::max(1.0, total))
    throw TopologyError("mesh does not tile its boundary region: sum of element areas " +
                        std::to_string(total) + " vs boundary integral " +
                        std::to_string(boundary_area));
}

void PolyMesh::retag_boundary(const std::function<FaceKind(const Point2 &)> &classify) {
  for (Face &f : faces)
    if (f.is_boundary()) {
      const Point2 mid = 0.5 * (vertices[f.vertices[0]] + vertices[f.vertices[1]]);
      f.kind = classify(mid);
      if (f.kind == FaceKind::interior)
        throw TopologyError("boundary face retagged as interior");
    }
}

PolyMesh generate_cartesian_mesh(const Rect &domain, int nx, int ny,
                                 const std::function<FaceKind(const Point2 &)> &classify) {
  if (domain.area() <= 0.0)
    throw ParseError("degenerate domain: zero area");
  if (nx < 1 || ny < 1)
    throw ParseError("cartesian mesh needs nx, ny >= 1");

  PolyMesh mesh;
  const double dx = domain.width() / nx;
  const double dy = domain.height() / ny;
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i)
      mesh.vertices.push_back({domain.x0 + i * dx, domain.y0 + j * dy});
  const auto vid = [nx](int i, int j) { return j * (nx + 1) + i; };
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i)
      mesh.elements.push_back({vid(i, j), vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1)});
  mesh.finalize(classify);
  return mesh;
}

namespace {

// Clipped Voronoi cell of seeds[i]: start from the domain rectangle and cut
// with bisector half-planes, nearest seeds first. A seed farther than twice
// the current cell radius cannot cut anymore.
std::vector<Point2> voronoi_cell(const Rect &domain, const std::vector<Point2> &seeds,
                                 const std::vector<int> &order, int i) {
  const Point2 si = seeds[i];
  std::vector<Point2> cell = {{domain.x0, domain.y0},
                              {domain.x1, domain.y0},
                              {domain.x1, domain.y1},
                              {domain.x0, domain.y1}};
  auto cell_radius = [&]() {
    double r2 = 0.0;
    for (const Point2 &p : cell) {
      const Point2 d = p - si;
      r2 = std::max(r2, dot(d, d));
    }
    return std::sqrt(r2);
  };
  double radius = cell_radius();
  for (int j : order) {
    if (j == i)
      continue;
    const Point2 diff = seeds[j] - si;
    const double dist = norm(diff);
    if (dist > 2.0 * radius)
      break; // order is sorted by distance from seeds[i]
    // Bisector half-plane kept for cell i: dot(p, diff) <= dot(mid, diff).
    const Point2 mid = 0.5 * (si + seeds[j]);
    cell = clip_halfplane(cell, diff, dot(mid, diff));
    if (cell.size() < 3)
      throw TopologyError("voronoi cell " + std::to_string(i) + " collapsed (coincident seeds?)");
    radius = cell_radius();
  }
  return cell;
}

std::vector<std::vector<Point2>> voronoi_cells(const Rect &domain,
                                               const std::vector<Point2> &seeds) {
  const int n = static_cast<int>(seeds.size());
  std::vector<std::vector<Point2>> cells(n);
  for (int i = 0; i < n; ++i) {
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      const Point2 da = seeds[a] - seeds[i];
      const Point2 db = seeds[b] - seeds[i];
      const double la = dot(da, da), lb = dot(db, db);
      return la != lb ? la < lb : a < b;
    });
    cells[i] = voronoi_cell(domain, seeds, order, i);
  }
  return cells;
}

// Weld per-cell vertex coordinates into a shared vertex table. Adjacent cells
// compute their common corners through different clip sequences, so snapping
// uses a tolerance relative to the domain diagonal.
PolyMesh weld_cells(const Rect &domain, const std::vector<std::vector<Point2>> &cells,
                    const std::function<FaceKind(const Point2 &)> &classify) {
  const double tol = 1e-9 * std::hypot(domain.width(), domain.height());
  const double inv = 1.0 / tol;
  std::map<std::pair<long long, long long>, int> grid;
  PolyMesh mesh;

  auto weld = [&](const Point2 &p) {
    const long long gx = static_cast<long long>(std::floor(p.x * inv));
    const long long gy = static_cast<long long>(std::floor(p.y * inv));
    for (long long ax = gx - 1; ax <= gx + 1; ++ax)
      for (long long ay = gy - 1; ay <= gy + 1; ++ay) {
        auto it = grid.find({ax, ay});
        if (it != grid.end() && distance(mesh.vertices[it->second], p) <= tol)
          return it->second;
      }
    const int id = static_cast<int>(mesh.vertices.size());
    mesh.vertices.push_back(p);
    grid[{gx, gy}] = id;
    return id;
  };

  for (const auto &cell : cells) {
    std::vector<int> loop;
    for (const Point2 &p : cell) {
      const int id = weld(p);
      if (loop.empty() || (loop.back() != id && loop.front() != id))
        loop.push_back(id);
    }
    if (loop.size() < 3)
      throw TopologyError("voronoi cell degenerated to fewer than 3 distinct vertices");
    mesh.elements.push_back(std::move(loop));
  }
  mesh.finalize(classify);
  return mesh;
}

} // namespace

PolyMesh voronoi_mesh_from_seeds(const Rect &domain, std::vector<Point2> seeds,
                                 int lloyd_iterations,
                                 const std::function<FaceKind(const Point2 &)> &classify) {
  if (domain.area() <= 0.0)
    throw ParseError("degenerate domain: zero area");
  if (seeds.empty())
    throw ParseError("voronoi mesh needs at least one seed");
  for (int it = 0; it < lloyd_iterations; ++it) {
    const auto cells = voronoi_cells(domain, seeds);
    for (std::size_t i = 0; i < seeds.size(); ++i)
      seeds[i] = polygon_centroid(cells[i]);
  }
  return weld_cells(domain, voronoi_cells(domain, seeds), classify);
}

PolyMesh generate_voronoi_mesh(const Rect &domain, int n_elements, int lloyd_iterations,
                               std::uint64_t seed,
                               const std::function<FaceKind(const Point2 &)> &classify) {
  if (n_elements < 1)
    throw ParseError("voronoi mesh needs n_elements >= 1");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ux(domain.x0, domain.x1), uy(domain.y0, domain.y1);
  std::vector<Point2> seeds(n_elements);
  for (Point2 &s : seeds) {
    s.x = ux(rng);
    s.y = uy(rng);
  }
  return voronoi_mesh_from_seeds(domain, std::move(seeds), lloyd_iterations, classify);
}

// --- text format ------------------------------------------------------------

namespace {

struct LineReader {
  std::istream &in;
  std::string name;
  int line_no = 0;

  // Next non-empty token line with '#' comments stripped.
  bool next(std::istringstream &out) {
    std::string line;
    while (std::getline(in, line)) {
      ++line_no;
      const auto hash = line.find('#');
      if (hash != std::string::npos)
        line.resize(hash);
      std::istringstream probe(line);
      std::string tok;
      if (probe >> tok) {
        out = std::istringstream(line);
        return true;
      }
    }
    return false;
  }

  [[noreturn]] void fail(const std::string &msg) const {
    throw ParseError(name + ":" + std::to_string(line_no) + ": " + msg);
  }
};

} // namespace

PolyMesh load_mesh(std::istream &in, const std::string &name) {
  LineReader rd{in, name};
  std::istringstream ls;

  auto expect_header = [&](const std::string &key) {
    std::string word;
    long long count = -1;
    if (!rd.next(ls))
      rd.fail("expected '" + key + " N'");
    if (!(ls >> word >> count) || word != key || count < 0)
      rd.fail("expected '" + key + " N'");
    return static_cast<int>(count);
  };

  if (!rd.next(ls))
    rd.fail("empty mesh file");
  std::string magic, dim;
  if (!(ls >> magic >> dim) || magic != "polymesh" || dim != "2d")
    rd.fail("expected header 'polymesh 2d'");

  PolyMesh mesh;
  const int nv = expect_header("vertices");
  mesh.vertices.reserve(nv);
  for (int i = 0; i < nv; ++i) {
    if (!rd.next(ls))
      rd.fail("expected vertex line");
    Point2 p;
    if (!(ls >> p.x >> p.y))
      rd.fail("malformed vertex line");
    mesh.vertices.push_back(p);
  }

  const int ne = expect_header("elements");
  mesh.elements.reserve(ne);
  for (int i = 0; i < ne; ++i) {
    if (!rd.next(ls))
      rd.fail("expected element line");
    int k = 0;
    if (!(ls >> k) || k < 3)
      rd.fail("element must list k >= 3 vertex indices");
    std::vector<int> el(k);
    for (int &v : el) {
      if (!(ls >> v))
        rd.fail("element lists fewer vertices than announced");
      if (v < 0 || v >= nv)
        rd.fail("vertex index " + std::to_string(v) + " out of range");
    }
    mesh.elements.push_back(std::move(el));
  }

  const int nb = expect_header("boundary");
  std::map<std::pair<int, int>, FaceKind> tags;
  for (int i = 0; i < nb; ++i) {
    if (!rd.next(ls))
      rd.fail("expected boundary line");
    int a = 0, b = 0;
    std::string tag;
    if (!(ls >> a >> b >> tag))
      rd.fail("malformed boundary line");
    if (a < 0 || a >= nv || b < 0 || b >= nv)
      rd.fail("boundary vertex index out of range");
    FaceKind kind;
    if (tag == "dirichlet")
      kind = FaceKind::dirichlet;
    else if (tag == "neumann")
      kind = FaceKind::neumann;
    else
      rd.fail("unknown boundary tag '" + tag + "'");
    const auto key = std::make_pair(std::min(a, b), std::max(a, b));
    if (tags.count(key))
      rd.fail("duplicate tag for boundary face " + std::to_string(a) + " " + std::to_string(b));
    tags[key] = kind;
  }

  mesh.finalize([&](const Point2 &) { return FaceKind::dirichlet; });
  // Replace placeholder tags with the declared ones; every boundary face
  // must be covered exactly once.
  std::size_t used = 0;
  for (Face &f : mesh.faces)
    if (f.is_boundary()) {
      const auto key = std::make_pair(std::min(f.vertices[0], f.vertices[1]),
                                      std::max(f.vertices[0], f.vertices[1]));
      const auto it = tags.find(key);
      if (it == tags.end())
        throw TopologyError(name + ": boundary face " + std::to_string(f.vertices[0]) + " " +
                            std::to_string(f.vertices[1]) + " of element " +
                            std::to_string(f.element_plus) + " has no tag");
      f.kind = it->second;
      ++used;
    }
  if (used != tags.size())
    throw TopologyError(name + ": " + std::to_string(tags.size() - used) +
                        " boundary tag(s) do not match any boundary face");
  return mesh;
}

PolyMesh load_mesh(const std::string &path) {
  std::ifstream in(path);
  if (!in)
    throw ParseError("cannot open mesh file '" + path + "'");
  return load_mesh(in, path);
}

void save_mesh(const PolyMesh &mesh, std::ostream &out) {
  out.precision(17);
  out << "polymesh 2d\n";
  out << "vertices " << mesh.vertices.size() << "\n";
  for (const Point2 &p : mesh.vertices)
    out << p.x << " " << p.y << "\n";
  out << "elements " << mesh.elements.size() << "\n";
  for (const auto &el : mesh.elements) {
    out << el.size();
    for (int v : el)
      out << " " << v;
    out << "\n";
  }
  std::size_t nb = 0;
  for (const Face &f : mesh.faces)
    nb += f.is_boundary() ? 1 : 0;
  out << "boundary " << nb << "\n";
  for (const Face &f : mesh.faces)
    if (f.is_boundary())
      out << f.vertices[0] << " " << f.vertices[1] << " "
          << (f.kind == FaceKind::dirichlet ? "dirichlet" : "neumann") << "\n";
}

void save_mesh(const PolyMesh &mesh, const std::string &path) {
  std::ofstream out(path);
  if (!out)
    throw ParseError("cannot write mesh file '" + path + "'");
  save_mesh(mesh, out);
}

// --- agglomeration ----------------------------------------------------------

namespace {

std::vector<std::vector<int>> element_adjacency(const PolyMesh &mesh) {
  std::vector<std::vector<int>> adj(mesh.n_elements());
  for (const Face &f : mesh.faces)
    if (!f.is_boundary()) {
      adj[f.element_plus].push_back(f.element_minus);
      adj[f.element_minus].push_back(f.element_plus);
    }
  for (auto &a : adj) {
    std::sort(a.begin(), a.end());
    a.erase(std::unique(a.begin(), a.end()), a.end());
  }
  return adj;
}

// Grow parts one element at a time, always expanding the part with the
// smallest accumulated area. Parts stay connected by construction.
std::vector<int> greedy_partition(const PolyMesh &mesh,
                                  const std::vector<std::vector<int>> &adj, int n_coarse,
                                  std::uint64_t seed) {
  const int n = mesh.n_elements();
  std::vector<int> part(n, -1);
  std::vector<double> part_area(n_coarse, 0.0);
  std::vector<std::deque<int>> frontier(n_coarse);

  std::mt19937_64 rng(seed);
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);

  int assigned = 0;
  for (int c = 0; c < n_coarse; ++c) {
    const int s = perm[c];
    part[s] = c;
    part_area[c] = mesh.element_areas[s];
    frontier[c].push_back(s);
    ++assigned;
  }

  while (assigned < n) {
    int best = -1;
    for (int c = 0; c < n_coarse; ++c)
      if (!frontier[c].empty() && (best < 0 || part_area[c] < part_area[best]))
        best = c;
    if (best < 0)
      throw TopologyError("agglomeration stalled: fine mesh is disconnected");
    bool grown = false;
    while (!frontier[best].empty() && !grown) {
      const int e = frontier[best].front();
      int candidate = -1;
      for (int nb : adj[e])
        if (part[nb] < 0 && (candidate < 0 || nb < candidate))
          candidate = nb;
      if (candidate < 0) {
        frontier[best].pop_front();
        continue;
      }
      part[candidate] = best;
      part_area[best] += mesh.element_areas[candidate];
      frontier[best].push_back(candidate);
      ++assigned;
      grown = true;
    }
    if (!grown)
      frontier[best].clear();
  }
  return part;
}

} // namespace

PolyMesh agglomerate(const PolyMesh &fine, int n_coarse, std::uint64_t seed) {
  if (n_coarse < 1 || n_coarse > fine.n_elements())
    throw ParseError("agglomerate: n_coarse must be in [1, n_fine]");

  const auto adj = element_adjacency(fine);
  {
    // Connectivity audit of the fine mesh.
    std::vector<char> seen(fine.n_elements(), 0);
    std::deque<int> queue{0};
    seen[0] = 1;
    int reached = 1;
    while (!queue.empty()) {
      const int e = queue.front();
      queue.pop_front();
      for (int nb : adj[e])
        if (!seen[nb]) {
          seen[nb] = 1;
          ++reached;
          queue.push_back(nb);
        }
    }
    if (reached != fine.n_elements())
      throw TopologyError("agglomerate: fine mesh is disconnected");
  }

  const auto part = greedy_partition(fine, adj, n_coarse, seed);

  // Boundary of a coarse cell = fine faces whose sides lie in different
  // parts (or on the domain boundary). Chain them into a single CCW loop;
  // intermediate fine vertices are kept so each fine segment stays one face.
  PolyMesh coarse;
  coarse.vertices = fine.vertices;
  coarse.elements.resize(n_coarse);

  std::vector<std::map<int, int>> next(n_coarse); // per part: vertex -> next vertex
  for (const Face &f : fine.faces) {
    const int pa = part[f.element_plus];
    const int pb = f.is_boundary() ? -1 : part[f.element_minus];
    if (pa == pb)
      continue;
    // Oriented as seen from each owning part: plus traverses (v0,v1),
    // minus traverses (v1,v0).
    if (!next[pa].emplace(f.vertices[0], f.vertices[1]).second)
      throw TopologyError("agglomerated part " + std::to_string(pa) +
                          " has a non-manifold boundary vertex " + std::to_string(f.vertices[0]));
    if (pb >= 0)
      if (!next[pb].emplace(f.vertices[1], f.vertices[0]).second)
        throw TopologyError("agglomerated part " + std::to_string(pb) +
                            " has a non-manifold boundary vertex " +
                            std::to_string(f.vertices[1]));
  }

  for (int c = 0; c < n_coarse; ++c) {
    auto &chain = next[c];
    if (chain.empty())
      throw TopologyError("agglomerated part " + std::to_string(c) + " is empty");
    std::vector<int> loop;
    const int start = chain.begin()->first;
    int v = start;
    do {
      loop.push_back(v);
      const auto it = chain.find(v);
      if (it == chain.end())
        throw TopologyError("agglomerated part " + std::to_string(c) +
                            " has an open boundary chain");
      v = it->second;
      chain.erase(it);
    } while (v != start && loop.size() <= fine.vertices.size());
    if (v != start)
      throw TopologyError("agglomerated part " + std::to_string(c) +
                          " boundary failed to close");
    if (!chain.empty())
      throw TopologyError("agglomerated part " + std::to_string(c) +
                          " encloses a hole; retry with a different seed");
    coarse.elements[c] = std::move(loop);
  }

  // Drop fine vertices not referenced by any coarse loop.
  std::vector<int> remap(fine.vertices.size(), -1);
  PolyMesh out;
  for (auto &el : coarse.elements) {
    for (int &v : el) {
      if (remap[v] < 0) {
        remap[v] = static_cast<int>(out.vertices.size());
        out.vertices.push_back(fine.vertices[v]);
      }
      v = remap[v];
    }
    out.elements.push_back(std::move(el));
  }

  // Tags carry over from the fine boundary faces.
  std::map<std::pair<int, int>, FaceKind> fine_tags;
  for (const Face &f : fine.faces)
    if (f.is_boundary()) {
      const int a = remap[f.vertices[0]], b = remap[f.vertices[1]];
      fine_tags[{std::min(a, b), std::max(a, b)}] = f.kind;
    }
  out.finalize([&](const Point2 &) { return FaceKind::dirichlet; });
  for (Face &f : out.faces)
    if (f.is_boundary()) {
      const auto it = fine_tags.find({std::min(f.vertices[0], f.vertices[1]),
                                      std::max(f.vertices[0], f.vertices[1])});
      if (it == fine_tags.end())
        throw TopologyError("agglomerated boundary face lost its fine tag");
      f.kind = it->second;
    }
  return out;
}

// --- sub-triangulation ------------------------------------------------------

namespace {

bool point_in_triangle(const Point2 &p, const Point2 &a, const Point2 &b, const Point2 &c) {
  const double d1 = cross(b - a, p - a);
  const double d2 = cross(c - b, p - b);
  const double d3 = cross(a - c, p - c);
  return d1 >= 0.0 && d2 >= 0.0 && d3 >= 0.0;
}

std::vector<std::array<Point2, 3>> ear_clip(std::vector<Point2> poly, int element_id) {
  std::vector<std::array<Point2, 3>> tris;
  const double scale = polygon_diameter(poly);
  const double eps = 1e-14 * scale * scale;
  int guard = 0;
  const int max_steps = static_cast<int>(poly.size() * poly.size()) + 16;
  while (poly.size() > 3) {
    if (++guard > max_steps)
      throw TopologyError("ear clipping failed on element " + std::to_string(element_id) +
                          " (self-intersecting polygon?)");
    const int n = static_cast<int>(poly.size());
    bool clipped = false;
    for (int i = 0; i < n; ++i) {
      const Point2 &a = poly[(i + n - 1) % n];
      const Point2 &b = poly[i];
      const Point2 &c = poly[(i + 1) % n];
      const double area2 = cross(b - a, c - a);
      if (area2 < -eps)
        continue; // reflex corner
      if (area2 <= eps) {
        // Collinear corner: removing it leaves the region unchanged.
        poly.erase(poly.begin() + i);
        clipped = true;
        break;
      }
      bool blocked = false;
      for (int j = 0; j < n && !blocked; ++j) {
        if (j == (i + n - 1) % n || j == i || j == (i + 1) % n)
          continue;
        blocked = point_in_triangle(poly[j], a, b, c);
      }
      if (blocked)
        continue;
      tris.push_back({a, b, c});
      poly.erase(poly.begin() + i);
      clipped = true;
      break;
    }
    if (!clipped)
      throw TopologyError("no ear found on element " + std::to_string(element_id) +
                          " (self-intersecting polygon?)");
  }
  if (poly.size() == 3) {
    if (cross(poly[1] - poly[0], poly[2] - poly[0]) > eps)
      tris.push_back({poly[0], poly[1], poly[2]});
  }
  return tris;
}

} // namespace

SubTriangulation sub_triangulate(const PolyMesh &mesh) {
  SubTriangulation sub;
  sub.triangles.resize(mesh.n_elements());
  for (int k = 0; k < mesh.n_elements(); ++k) {
    const auto loop = mesh.element_loop(k);
    std::vector<std::array<Point2, 3>> tris;
    if (polygon_is_convex(loop)) {
      const Point2 c = polygon_centroid(loop);
      const int n = static_cast<int>(loop.size());
      for (int i = 0; i < n; ++i) {
        const Point2 &a = loop[i];
        const Point2 &b = loop[(i + 1) % n];
        if (cross(a - c, b - c) > 0.0)
          tris.push_back({c, a, b});
      }
    } else {
      tris = ear_clip(loop, k);
    }
    double covered = 0.0;
    for (const auto &t : tris)
      covered += 0.5 * cross(t[1] - t[0], t[2] - t[0]);
    if (std::abs(covered - mesh.element_areas[k]) > 1e-12 * mesh.element_areas[k])
      throw TopologyError("sub-triangulation of element " + std::to_string(k) +
                          " does not cover it: " + std::to_string(covered) + " vs " +
                          std::to_string(mesh.element_areas[k]));
    sub.triangles[k] = std::move(tris);
  }
  return sub;
}

RegularityReport check_regularity(const PolyMesh &mesh) {
  RegularityReport rep;
  rep.shape_min = rep.contact_min = std::numeric_limits<double>::max();
  for (int k = 0; k < mesh.n_elements(); ++k) {
    const double r = mesh.element_areas[k] / (mesh.element_diameters[k] * mesh.element_diameters[k]);
    rep.shape_min = std::min(rep.shape_min, r);
    rep.shape_max = std::max(rep.shape_max, r);
  }
  for (const Face &f : mesh.faces) {
    for (int el : {f.element_plus, f.element_minus}) {
      if (el < 0)
        continue;
      const double r = f.length / mesh.element_diameters[el];
      rep.contact_min = std::min(rep.contact_min, r);
      rep.contact_max = std::max(rep.contact_max, r);
    }
  }
  return rep;
}

} // namespace polyfk
