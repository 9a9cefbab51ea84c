#include "baca/mesh.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <unordered_map>

#include "baca/errors.hpp"

namespace baca {

namespace {

std::uint64_t edge_key(int a, int b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint32_t>(b);
}

// Caches edge midpoints so both triangles sharing an edge reuse the vertex.
class MidpointCache {
 public:
  MidpointCache(std::vector<Vec3>& vertices, const SurfaceTag& tag)
      : vertices_(vertices), tag_(tag) {}

  int operator()(int a, int b) {
    auto [it, inserted] = cache_.try_emplace(edge_key(a, b), 0);
    if (inserted) {
      vertices_.push_back(tag_.project(0.5 * (vertices_[a] + vertices_[b])));
      it->second = static_cast<int>(vertices_.size()) - 1;
    }
    return it->second;
  }

 private:
  std::vector<Vec3>& vertices_;
  const SurfaceTag& tag_;
  std::unordered_map<std::uint64_t, int> cache_;
};

}  // namespace

Vec3 SurfaceTag::project(const Vec3& p) const {
  switch (kind) {
    case Kind::none:
      return p;
    case Kind::sphere:
      return p.normalized() * semiaxes[0];
    case Kind::ellipsoid: {
      const Vec3 q = p.cwiseQuotient(semiaxes);
      return q.normalized().cwiseProduct(semiaxes);
    }
  }
  return p;
}

TriMesh::TriMesh(std::vector<Vec3> vertices, std::vector<Triangle> triangles, SurfaceTag tag)
    : vertices_(std::move(vertices)), triangles_(std::move(triangles)), tag_(tag) {
  const int nv = static_cast<int>(vertices_.size());
  for (std::size_t i = 0; i < triangles_.size(); ++i) {
    for (int v : triangles_[i]) {
      if (v < 0 || v >= nv) {
        throw GeometryError("triangle " + std::to_string(i) + " references vertex " +
                            std::to_string(v) + " outside [0, " + std::to_string(nv) + ")");
      }
    }
    const auto c = corners(i);
    if ((c[1] - c[0]).cross(c[2] - c[0]).norm() <= 0.0) {
      throw GeometryError("triangle " + std::to_string(i) + " is degenerate");
    }
  }
}

PanelGeometry panel_geometry(const std::array<Vec3, 3>& c) {
  PanelGeometry g;
  const Vec3 n = (c[1] - c[0]).cross(c[2] - c[0]);
  const double twice_area = n.norm();
  if (!(twice_area > 0.0)) throw GeometryError("degenerate panel");
  g.area = 0.5 * twice_area;
  g.unit_normal = n / twice_area;
  g.centroid = (c[0] + c[1] + c[2]) / 3.0;
  for (int k = 0; k < 3; ++k) {
    EdgeFrame& e = g.edges[k];
    const Vec3 d = c[(k + 1) % 3] - c[k];
    e.start = c[k];
    e.length = d.norm();
    e.tangent = d / e.length;
    e.outward_normal = e.tangent.cross(g.unit_normal);
    g.diameter = std::max(g.diameter, e.length);
  }
  return g;
}

PanelGeometry panel_geometry(const TriMesh& mesh, std::size_t i) {
  if (i >= mesh.num_triangles()) {
    throw RangeError("panel index " + std::to_string(i) + " out of range");
  }
  return panel_geometry(mesh.corners(i));
}

bool is_closed(const TriMesh& mesh) {
  // directed edge -> count; each must appear once, together with its reverse
  std::map<std::pair<int, int>, int> directed;
  for (const auto& t : mesh.triangles()) {
    for (int k = 0; k < 3; ++k) {
      if (++directed[{t[k], t[(k + 1) % 3]}] > 1) return false;
    }
  }
  for (const auto& [e, count] : directed) {
    auto it = directed.find({e.second, e.first});
    if (it == directed.end() || it->second != 1) return false;
  }
  return !directed.empty();
}

double signed_volume(const TriMesh& mesh) {
  double v = 0.0;
  for (std::size_t i = 0; i < mesh.num_triangles(); ++i) {
    const auto c = mesh.corners(i);
    v += c[0].dot(c[1].cross(c[2]));
  }
  return v / 6.0;
}

double surface_area(const TriMesh& mesh) {
  double a = 0.0;
  for (std::size_t i = 0; i < mesh.num_triangles(); ++i) {
    const auto c = mesh.corners(i);
    a += 0.5 * (c[1] - c[0]).cross(c[2] - c[0]).norm();
  }
  return a;
}

TriMesh generate_icosphere(int level, double radius) {
  if (level < 0 || level > 7) {
    throw SizeError("icosphere level " + std::to_string(level) + " outside [0, 7]");
  }
  if (!(radius > 0.0)) throw PreconditionError("icosphere radius must be positive");
  const double phi = 0.5 * (1.0 + std::sqrt(5.0));
  const auto tag = SurfaceTag::sphere(radius);
  std::vector<Vec3> v = {{-1, phi, 0}, {1, phi, 0},  {-1, -phi, 0}, {1, -phi, 0},
                         {0, -1, phi}, {0, 1, phi},  {0, -1, -phi}, {0, 1, -phi},
                         {phi, 0, -1}, {phi, 0, 1},  {-phi, 0, -1}, {-phi, 0, 1}};
  for (auto& p : v) p = tag.project(p);
  std::vector<Triangle> f = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
                             {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
                             {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
                             {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
  for (int l = 0; l < level; ++l) {
    MidpointCache mid(v, tag);
    std::vector<Triangle> next;
    next.reserve(4 * f.size());
    for (const auto& [a, b, c] : f) {
      const int ab = mid(a, b), bc = mid(b, c), ca = mid(c, a);
      next.push_back({a, ab, ca});
      next.push_back({b, bc, ab});
      next.push_back({c, ca, bc});
      next.push_back({ab, bc, ca});
    }
    f = std::move(next);
  }
  return TriMesh(std::move(v), std::move(f), tag);
}

TriMesh map_to_ellipsoid(const TriMesh& mesh, const Vec3& semiaxes) {
  if ((semiaxes.array() <= 0.0).any()) throw PreconditionError("semi-axes must be positive");
  std::vector<Vec3> v = mesh.vertices();
  for (auto& p : v) {
    if (std::abs(p.norm() - 1.0) > 1e-9) {
      throw PreconditionError("map_to_ellipsoid expects vertices on the unit sphere");
    }
    p = p.cwiseProduct(semiaxes);
  }
  return TriMesh(std::move(v), mesh.triangles(), SurfaceTag::ellipsoid(semiaxes));
}

namespace {

TriMesh refine_once(const TriMesh& mesh, const std::function<bool(const Vec3&)>& marked) {
  const std::size_t n = mesh.num_triangles();
  std::vector<char> red(n, 0);
  std::unordered_map<std::uint64_t, char> split;  // edges to bisect
  for (std::size_t i = 0; i < n; ++i) {
    const auto c = mesh.corners(i);
    if (marked((c[0] + c[1] + c[2]) / 3.0)) {
      red[i] = 1;
      const auto& t = mesh.triangle(i);
      for (int k = 0; k < 3; ++k) split[edge_key(t[k], t[(k + 1) % 3])] = 1;
    }
  }
  auto is_split = [&](int a, int b) { return split.count(edge_key(a, b)) > 0; };
  // Longest edge of a triangle; among (near-)ties an already split edge wins so
  // that equilateral neighbours bisect the shared edge.
  auto longest = [&](const Triangle& t) {
    std::array<double, 3> len{};
    for (int k = 0; k < 3; ++k) {
      len[k] = (mesh.vertex(t[(k + 1) % 3]) - mesh.vertex(t[k])).norm();
    }
    const double lmax = std::max({len[0], len[1], len[2]});
    int best = -1;
    for (int k = 0; k < 3; ++k) {
      if (len[k] >= lmax * (1.0 - 1e-12) && is_split(t[k], t[(k + 1) % 3])) return k;
      if (best < 0 && len[k] >= lmax * (1.0 - 1e-12)) best = k;
    }
    return best;
  };

  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      if (red[i]) continue;
      const auto& t = mesh.triangle(i);
      bool any = false;
      for (int k = 0; k < 3; ++k) any = any || is_split(t[k], t[(k + 1) % 3]);
      if (!any) continue;
      const int l = longest(t);
      if (!is_split(t[l], t[(l + 1) % 3])) {
        split[edge_key(t[l], t[(l + 1) % 3])] = 1;
        changed = true;
      }
    }
  }

  std::vector<Vec3> v = mesh.vertices();
  MidpointCache mid(v, mesh.surface());
  std::vector<Triangle> out;
  out.reserve(n + 3 * split.size());
  for (std::size_t i = 0; i < n; ++i) {
    const auto& t = mesh.triangle(i);
    if (red[i]) {
      const auto [a, b, c] = t;
      const int ab = mid(a, b), bc = mid(b, c), ca = mid(c, a);
      out.push_back({a, ab, ca});
      out.push_back({b, bc, ab});
      out.push_back({c, ca, bc});
      out.push_back({ab, bc, ca});
      continue;
    }
    const int l = longest(t);
    if (l < 0 || !is_split(t[l], t[(l + 1) % 3])) {
      out.push_back(t);
      continue;
    }
    const int a = t[l], b = t[(l + 1) % 3], c = t[(l + 2) % 3];
    const int m = mid(a, b);
    // children (a, m, c) and (m, b, c); each may carry one more split edge
    if (is_split(c, a)) {
      const int q = mid(c, a);
      out.push_back({c, q, m});
      out.push_back({q, a, m});
    } else {
      out.push_back({a, m, c});
    }
    if (is_split(b, c)) {
      const int q = mid(b, c);
      out.push_back({b, q, m});
      out.push_back({q, c, m});
    } else {
      out.push_back({m, b, c});
    }
  }
  return TriMesh(std::move(v), std::move(out), mesh.surface());
}

}  // namespace

TriMesh refine_region(const TriMesh& mesh, const std::function<bool(const Vec3&)>& marked,
                      int rounds) {
  if (rounds < 0 || rounds > 6) throw PreconditionError("refinement rounds outside [0, 6]");
  if (!is_closed(mesh)) throw PreconditionError("refine_region requires a closed mesh");
  TriMesh current = mesh;
  for (int r = 0; r < rounds; ++r) current = refine_once(current, marked);
  return current;
}

TriMesh read_off(std::istream& in) {
  auto next_line = [&](std::string& line) {
    while (std::getline(in, line)) {
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      if (line.find_first_not_of(" \t\r") != std::string::npos) return true;
    }
    return false;
  };
  std::string line;
  if (!next_line(line)) throw FormatError("OFF: empty input");
  std::istringstream header(line);
  std::string magic;
  header >> magic;
  if (magic != "OFF") throw FormatError("OFF: missing 'OFF' header");
  long nv = -1, nf = -1, ne = 0;
  if (!(header >> nv)) {
    if (!next_line(line)) throw FormatError("OFF: missing counts line");
    header = std::istringstream(line);
    header >> nv;
  }
  if (!(header >> nf) || nv < 0 || nf < 0) throw FormatError("OFF: malformed counts line");
  header >> ne;

  std::vector<Vec3> vertices(static_cast<std::size_t>(nv));
  for (auto& p : vertices) {
    if (!next_line(line)) throw FormatError("OFF: truncated vertex list");
    std::istringstream ls(line);
    if (!(ls >> p[0] >> p[1] >> p[2])) throw FormatError("OFF: malformed vertex line");
  }
  std::vector<Triangle> triangles(static_cast<std::size_t>(nf));
  for (auto& t : triangles) {
    if (!next_line(line)) throw FormatError("OFF: truncated face list");
    std::istringstream ls(line);
    int count = 0;
    if (!(ls >> count)) throw FormatError("OFF: malformed face line");
    if (count != 3) throw FormatError("OFF: non-triangle face with " + std::to_string(count) + " vertices");
    if (!(ls >> t[0] >> t[1] >> t[2])) throw FormatError("OFF: malformed face line");
    for (int v : t) {
      if (v < 0 || v >= nv) throw FormatError("OFF: face index " + std::to_string(v) + " out of range");
    }
  }
  return TriMesh(std::move(vertices), std::move(triangles));
}

void write_off(const TriMesh& mesh, std::ostream& out) {
  out << "OFF\n" << mesh.num_vertices() << ' ' << mesh.num_triangles() << " 0\n";
  out << std::setprecision(17);
  for (const auto& p : mesh.vertices()) out << p[0] << ' ' << p[1] << ' ' << p[2] << '\n';
  for (const auto& t : mesh.triangles()) out << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
}

TriMesh load_off(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return read_off(in);
}

void save_off(const TriMesh& mesh, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  write_off(mesh, out);
}

}  // namespace baca
