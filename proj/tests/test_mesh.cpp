#include <doctest.h>

#include <cmath>
#include <set>
#include <sstream>

#include "baca/errors.hpp"
#include "baca/mesh.hpp"

using namespace baca;

namespace {

std::size_t count_edges(const TriMesh& m) {
  std::set<std::pair<int, int>> edges;
  for (const auto& t : m.triangles()) {
    for (int k = 0; k < 3; ++k) {
      const int a = t[k], b = t[(k + 1) % 3];
      edges.insert({std::min(a, b), std::max(a, b)});
    }
  }
  return edges.size();
}

TriMesh parse(const std::string& text) {
  std::istringstream in(text);
  return read_off(in);
}

}  // namespace

TEST_CASE("icosphere vertex and triangle counts") {
  const auto m0 = generate_icosphere(0, 1.0);
  CHECK(m0.num_vertices() == 12);
  CHECK(m0.num_triangles() == 20);

  const auto m3 = generate_icosphere(3, 1.0);
  CHECK(m3.num_vertices() == 642);
  CHECK(m3.num_triangles() == 1280);

  // one subdivision adds one vertex per edge of the coarse mesh
  const auto m1 = generate_icosphere(1, 1.0);
  CHECK(count_edges(m0) == 3 * m0.num_triangles() / 2);
  CHECK(m1.num_vertices() == m0.num_vertices() + count_edges(m0));
  CHECK(m1.num_vertices() == 42);
  CHECK(m1.num_triangles() == 80);

  for (int level = 0; level <= 4; ++level) {
    const auto m = generate_icosphere(level, 1.0);
    const std::size_t p = std::size_t(1) << (2 * level);
    CHECK(m.num_triangles() == 20 * p);
    CHECK(m.num_vertices() == 10 * p + 2);
  }
}

TEST_CASE("icosphere is closed, outward and on the sphere") {
  for (double r : {1.0, 2.5}) {
    const auto m = generate_icosphere(2, r);
    CHECK(is_closed(m));
    CHECK(signed_volume(m) > 0.0);
    CHECK(signed_volume(m) < 4.0 / 3.0 * M_PI * r * r * r);
    for (const auto& v : m.vertices()) CHECK(v.norm() == doctest::Approx(r).epsilon(1e-14));
  }
  // inscribed polyhedra approach the ball from below
  CHECK(signed_volume(generate_icosphere(4)) > signed_volume(generate_icosphere(3)));
  CHECK(surface_area(generate_icosphere(4)) == doctest::Approx(4.0 * M_PI).epsilon(5e-3));
}

TEST_CASE("icosphere level guard") {
  CHECK_THROWS_AS(generate_icosphere(8, 1.0), SizeError);
  CHECK_THROWS_AS(generate_icosphere(-1, 1.0), SizeError);
}

TEST_CASE("panel geometry") {
  const auto m = generate_icosphere(2);
  for (std::size_t i = 0; i < m.num_triangles(); ++i) {
    const auto g = panel_geometry(m, i);
    const auto c = m.corners(i);
    CHECK(std::abs(g.unit_normal.norm() - 1.0) <= 1e-12);
    CHECK(g.area == doctest::Approx(0.5 * (c[1] - c[0]).cross(c[2] - c[0]).norm()));
    CHECK(g.unit_normal.dot(g.centroid) > 0.0);
    for (const auto& e : g.edges) {
      CHECK(e.outward_normal.dot(g.centroid - e.start) < 0.0);
      CHECK(std::abs(e.tangent.dot(e.outward_normal)) < 1e-14);
    }
  }
  CHECK_THROWS_AS(panel_geometry(m, m.num_triangles()), RangeError);
}

TEST_CASE("degenerate input is rejected") {
  std::vector<Vec3> v{{0, 0, 0}, {1, 0, 0}, {2, 0, 0}};
  CHECK_THROWS_AS(TriMesh(v, {{0, 1, 2}}), GeometryError);
  CHECK_THROWS_AS(TriMesh(v, {{0, 1, 3}}), GeometryError);
}

TEST_CASE("map to ellipsoid") {
  const auto sphere = generate_icosphere(3);
  const auto same = map_to_ellipsoid(sphere, Vec3(1, 1, 1));
  CHECK(same == sphere);

  const auto e = map_to_ellipsoid(sphere, Vec3(1, 1, 3));
  CHECK(e.triangles() == sphere.triangles());
  for (const auto& v : e.vertices()) {
    CHECK(std::abs(v[0] * v[0] + v[1] * v[1] + v[2] * v[2] / 9.0 - 1.0) <= 1e-9);
  }

  const auto stretched = map_to_ellipsoid(sphere, Vec3(2, 1, 1));
  CHECK(signed_volume(stretched) == doctest::Approx(2.0 * signed_volume(sphere)).epsilon(1e-12));

  CHECK_THROWS_AS(map_to_ellipsoid(generate_icosphere(1, 2.0), Vec3(1, 1, 1)), PreconditionError);
}

TEST_CASE("region refinement") {
  const auto ico = generate_icosphere(0);
  const Vec3 c0 = (ico.corners(0)[0] + ico.corners(0)[1] + ico.corners(0)[2]) / 3.0;
  auto only_first = [c0](const Vec3& c) { return (c - c0).norm() < 1e-12; };

  // one red face plus three bisected neighbours
  const auto one = refine_region(ico, only_first, 1);
  CHECK(one.num_triangles() == 20 - 1 - 3 + 4 + 2 * 3);
  CHECK(is_closed(one));
  CHECK(signed_volume(one) > signed_volume(ico));

  const auto none = refine_region(ico, [](const Vec3&) { return false; }, 3);
  CHECK(none == ico);

  const auto all = refine_region(ico, [](const Vec3&) { return true; }, 2);
  CHECK(all.num_triangles() == 20 * 16);
  CHECK(all.num_vertices() == 162);
  for (const auto& v : all.vertices()) CHECK(v.norm() == doctest::Approx(1.0).epsilon(1e-14));

  // ellipsoid band: closed, conforming, new vertices on the analytic surface
  const auto ell = map_to_ellipsoid(generate_icosphere(2), Vec3(1, 1, 3));
  const auto band = refine_region(ell, [](const Vec3& c) { return std::abs(c[2]) < 1.0; }, 2);
  CHECK(is_closed(band));
  CHECK(band.num_triangles() > ell.num_triangles());
  CHECK(signed_volume(band) > 0.0);
  for (const auto& v : band.vertices()) {
    CHECK(std::abs(v[0] * v[0] + v[1] * v[1] + v[2] * v[2] / 9.0 - 1.0) <= 1e-9);
  }

  CHECK_THROWS_AS(refine_region(ico, only_first, 7), PreconditionError);
  TriMesh open({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}}, {{0, 1, 2}});
  CHECK_THROWS_AS(refine_region(open, only_first, 1), PreconditionError);
}

TEST_CASE("OFF round trip") {
  const auto m = map_to_ellipsoid(generate_icosphere(2), Vec3(1, 2, 3));
  std::stringstream ss;
  write_off(m, ss);
  const auto back = read_off(ss);
  CHECK(back == m);
}

TEST_CASE("OFF errors") {
  CHECK_THROWS_AS(parse("COFF\n3 1 0\n0 0 0\n1 0 0\n0 1 0\n3 0 1 2\n"), FormatError);
  CHECK_THROWS_AS(parse("OFF\n4 1 0\n0 0 0\n1 0 0\n0 1 0\n1 1 0\n4 0 1 3 2\n"), FormatError);
  CHECK_THROWS_AS(parse("OFF\n3 1 0\n0 0 0\n1 0 0\n0 1 0\n3 0 1 5\n"), FormatError);
  CHECK_THROWS_AS(parse("OFF\n3 1 0\n0 0 0\n1 0 0\n"), FormatError);
  const auto tri = parse("OFF\n# comment\n3 1 0\n0 0 0\n1 0 0\n0 1 0\n3 0 1 2\n");
  CHECK(tri.num_triangles() == 1);
  CHECK_THROWS(load_off("/nonexistent/mesh.off"));
}
