#include <cmath>
#include <numbers>
#include <sstream>

#include "doctest.h"
#include "rtrecover/mesh.hpp"
#include "rtrecover/mesh_generators.hpp"
#include "support.hpp"

using namespace rtrecover;
using testing::conforming;
using testing::euler;

TEST_CASE("unit square split by a diagonal") {
  const Mesh m = testing::two_triangle_square();
  CHECK(m.num_vertices() == 4);
  CHECK(m.num_triangles() == 2);
  CHECK(m.num_edges() == 5);
  CHECK(m.num_interior_edges() == 1);
  for (int e = 0; e < m.num_edges(); ++e) {
    CHECK(m.edge(e)[0] < m.edge(e)[1]);
    const Point t = m.edge_tangent(e), n = m.edge_normal(e);
    CHECK(n.x() == doctest::Approx(t.y()));
    CHECK(n.y() == doctest::Approx(-t.x()));
  }
}

TEST_CASE("build rejects bad input") {
  CHECK_THROWS_AS(Mesh::build({{0, 0}, {1, 0}, {1, 0}}, {{0, 1, 2}}), MeshError);
  CHECK_THROWS_AS(Mesh::build({{0, 0}, {1, 0}, {0, 1}}, {{0, 1, 1}}), MeshError);
  CHECK_THROWS_AS(Mesh::build({{0, 0}, {1, 0}, {0, 1}}, {{0, 1, 3}}), MeshError);
  // three triangles on the edge (0,1)
  CHECK_THROWS_AS(Mesh::build({{0, 0}, {1, 0}, {0.5, 1}, {0.5, -1}, {0.5, 2}}, {{0, 1, 2}, {1, 0, 3}, {0, 1, 4}}),
                  MeshError);
  // vertex 4 hangs on the diagonal of the lower triangle
  CHECK_THROWS_AS(Mesh::build({{0, 0}, {1, 0}, {1, 1}, {0, 1}, {0.5, 0.5}}, {{0, 1, 2}, {0, 4, 3}, {4, 2, 3}}),
                  MeshError);
}

TEST_CASE("clockwise triangles are reordered") {
  const Mesh m = Mesh::build({{0, 0}, {1, 0}, {1, 1}, {0, 1}}, {{0, 2, 1}, {0, 3, 2}});
  for (int t = 0; t < m.num_triangles(); ++t) {
    const auto& tri = m.triangle(t);
    CHECK(testing::signed_area(m.vertex(tri[0]), m.vertex(tri[1]), m.vertex(tri[2])) > 0);
  }
  CHECK(m.total_area() == doctest::Approx(1.0));
}

TEST_CASE("edge signs point outward") {
  const Mesh m = delaunay_unit_square(86, 3);
  for (int t = 0; t < m.num_triangles(); ++t) {
    const auto& tri = m.triangle(t);
    const Point c = (m.vertex(tri[0]) + m.vertex(tri[1]) + m.vertex(tri[2])) / 3.0;
    for (int k = 0; k < 3; ++k) {
      const int e = m.triangle_edges(t)[k];
      const double outward = (m.edge_midpoint(e) - c).dot(m.edge_normal(e));
      CHECK(m.edge_sign(t, k) * outward > 0);
    }
  }
}

TEST_CASE("Delaunay square with 86 triangles") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Mesh m = delaunay_unit_square(86, seed);
    CHECK(m.num_triangles() == 86);
    CHECK(euler(m) == 1);
    CHECK(conforming(m));
    CHECK(m.total_area() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_NOTHROW(validate(m));
  }
  // same seed, same mesh
  std::ostringstream a, b;
  write_mesh(a, delaunay_unit_square(86, 7));
  write_mesh(b, delaunay_unit_square(86, 7));
  CHECK(a.str() == b.str());
}

TEST_CASE("regular refinement") {
  const Mesh sq = refine_regular(testing::two_triangle_square());
  CHECK(sq.num_triangles() == 8);

  Mesh m = delaunay_unit_square(86, 1);
  const int expected[] = {344, 1376, 5504};
  for (int level = 0; level < 3; ++level) {
    const Mesh fine = refine_regular(m);
    CHECK(fine.num_triangles() == expected[level]);
    CHECK(euler(fine) == 1);
    for (int t = 0; t < fine.num_triangles(); ++t) {
      const int p = fine.parent(t);
      REQUIRE(p >= 0);
      CHECK(fine.area(t) == doctest::Approx(m.area(p) / 4).epsilon(1e-14));
      const auto& c = fine.triangle(t);
      const auto& q = m.triangle(p);
      const auto ac = testing::sorted_angles(fine.vertex(c[0]), fine.vertex(c[1]), fine.vertex(c[2]));
      const auto ap = testing::sorted_angles(m.vertex(q[0]), m.vertex(q[1]), m.vertex(q[2]));
      for (int i = 0; i < 3; ++i) CHECK(std::abs(ac[i] - ap[i]) < 1e-12);
    }
    m = fine;
  }
  CHECK(conforming(m));
}

TEST_CASE("newest vertex bisection") {
  const Mesh m = delaunay_unit_square(86, 1);
  SUBCASE("every triangle bisected twice") {
    const Mesh u = refine_bisection_uniform(m);
    CHECK(u.num_triangles() == 344);
    CHECK(refine_bisection_uniform(u).num_triangles() == 1376);
    std::vector<int> all(m.num_triangles());
    for (int t = 0; t < m.num_triangles(); ++t) all[t] = t;
    const Mesh once = refine_bisection(m, all);
    // closure may bisect some triangles a second time
    CHECK(once.num_triangles() >= 172);
    CHECK(once.num_triangles() <= 344);
    CHECK(conforming(once));
    BisectionOptions twice;
    twice.bisections_per_mark = 2;
    CHECK(refine_bisection(m, all, twice).num_triangles() == 344);
  }
  SUBCASE("single interior triangle") {
    int interior = -1;
    for (int t = 0; t < m.num_triangles() && interior < 0; ++t) {
      bool inner = true;
      for (int k = 0; k < 3; ++k) inner = inner && !m.is_boundary_edge(m.triangle_edges(t)[k]);
      if (inner) interior = t;
    }
    REQUIRE(interior >= 0);
    const int marked[] = {interior};
    const Mesh r = refine_bisection(m, marked);
    CHECK(r.num_triangles() > m.num_triangles());
    CHECK(conforming(r));
    CHECK(euler(r) == 1);
    CHECK(r.total_area() == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("empty marking") {
    const Mesh r = refine_bisection(m, std::vector<int>{});
    std::ostringstream a, b;
    write_mesh(a, m);
    write_mesh(b, r);
    CHECK(a.str() == b.str());
  }
  SUBCASE("closure depth bound") {
    // repeated local refinement needs closure; a zero bound must trip
    Mesh r = m;
    bool tripped = false;
    for (int it = 0; it < 6 && !tripped; ++it) {
      const int marked[] = {0};
      BisectionOptions opt;
      opt.max_closure_depth = 0;
      try {
        r = refine_bisection(r, marked, opt);
      } catch (const MeshError&) {
        tripped = true;
      }
    }
    CHECK(tripped);
  }
  SUBCASE("angles stay bounded") {
    Mesh r = m;
    const double initial = m.min_angle();
    for (int it = 0; it < 4; ++it) r = refine_bisection_uniform(r);
    CHECK(r.min_angle() >= initial / 4);
  }
}

TEST_CASE("adaptive refinement") {
  const Mesh m = delaunay_unit_square(86, 2);
  SUBCASE("mark all equals regular refinement") {
    std::vector<int> all(m.num_triangles());
    for (int t = 0; t < m.num_triangles(); ++t) all[t] = t;
    std::ostringstream a, b;
    write_mesh(a, refine_adaptive(m, all));
    write_mesh(b, refine_regular(m));
    CHECK(a.str() == b.str());
  }
  SUBCASE("one triangle of the square") {
    const int marked[] = {0};
    const Mesh r = refine_adaptive(testing::two_triangle_square(), marked);
    CHECK(r.num_triangles() >= 6);
    CHECK(conforming(r));
    CHECK(euler(r) == 1);
  }
  SUBCASE("corner refinement keeps angles bounded") {
    Mesh r = m;
    const double initial = r.min_angle();
    for (int it = 0; it < 10; ++it) {
      std::vector<int> marked;
      for (int t = 0; t < r.num_triangles(); ++t) {
        const auto& tri = r.triangle(t);
        for (int k = 0; k < 3; ++k)
          if (r.vertex(tri[k]).norm() < 1e-14) marked.push_back(t);
      }
      REQUIRE(!marked.empty());
      r = refine_adaptive(r, marked);
      CHECK(conforming(r));
      CHECK(r.min_angle() >= initial / 4);
    }
    CHECK(r.total_area() == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("triangle geometry") {
  SUBCASE("right triangle") {
    const auto g = TriangleGeometry::from_vertices({0, 0}, {1, 0}, {0, 1});
    CHECK(g.lengths[0] == doctest::Approx(std::sqrt(2.0)));
    CHECK(g.lengths[1] == doctest::Approx(1.0));
    CHECK(g.lengths[2] == doctest::Approx(1.0));
    CHECK(g.area == doctest::Approx(0.5));
    CHECK(g.angles[0] == doctest::Approx(std::numbers::pi / 2));
  }
  SUBCASE("equilateral") {
    const auto g = TriangleGeometry::from_vertices({0, 0}, {1, 0}, {0.5, std::sqrt(3.0) / 2});
    CHECK(g.circumdiameter == doctest::Approx(2 / std::sqrt(3.0)));
    for (int k = 0; k < 3; ++k) {
      CHECK(g.angles[k] == doctest::Approx(std::numbers::pi / 3));
      CHECK(g.circumdiameter == doctest::Approx(g.lengths[k] / std::sin(g.angles[k])));
    }
  }
  SUBCASE("random triangles") {
    std::mt19937_64 rng(11);
    for (int s = 0; s < 200; ++s) {
      const auto z = testing::random_triangle(rng, 0.05);
      const auto g = TriangleGeometry::from_vertices(z[0], z[1], z[2]);
      CHECK(g.area == doctest::Approx(testing::signed_area(z[0], z[1], z[2])).epsilon(1e-13));
      for (int k = 0; k < 3; ++k) {
        const int km = (k + 2) % 3, kp = (k + 1) % 3;
        const double lk = g.lengths[k], lm = g.lengths[km], lp = g.lengths[kp];
        CHECK(lk == doctest::Approx((z[kp] - z[km]).norm()).epsilon(1e-14));
        CHECK(std::sin(g.angles[k]) == doctest::Approx(lk / g.circumdiameter).epsilon(1e-12));
        CHECK(g.altitudes[k] == doctest::Approx(lm * lp / g.circumdiameter).epsilon(1e-12));
        CHECK(g.altitudes[k] == doctest::Approx(2 * g.area / lk).epsilon(1e-12));
        CHECK(std::cos(g.angles[k]) == doctest::Approx((lm * lm + lp * lp - lk * lk) / (2 * lm * lp)).epsilon(1e-12));
        const Point t = g.tangents[k], n = g.normals[k];
        CHECK((Point(-n.y(), n.x()) - t).norm() < 1e-14);
        CHECK((Point(-t.y(), t.x()) + n).norm() < 1e-14);
        // outward: pointing away from the opposite vertex
        CHECK(n.dot(z[kp] - z[k]) > 0);
        for (int i = 0; i < 3; ++i)
          CHECK(g.grad_lambda[k].dot(z[i] - z[kp]) == doctest::Approx(i == k ? 1.0 : 0.0).epsilon(1e-12));
      }
      const Point x = 0.2 * z[0] + 0.3 * z[1] + 0.5 * z[2];
      const auto lam = g.barycentric(x);
      CHECK(lam[0] == doctest::Approx(0.2));
      CHECK(lam[2] == doctest::Approx(0.5));
      CHECK((g.from_barycentric(lam) - x).norm() < 1e-13);
    }
  }
}

TEST_CASE("vertex patches") {
  SUBCASE("interior star of the structured grid") {
    const Mesh m = structured_unit_square(4);
    int v = -1;
    for (int i = 0; i < m.num_vertices(); ++i)
      if ((m.vertex(i) - Point(0.5, 0.5)).norm() < 1e-14) v = i;
    REQUIRE(v >= 0);
    const Patch p = vertex_patch(m, v);
    CHECK(p.triangles.size() == 6);
    CHECK(p.edges.size() == 12);
    CHECK(p.vertices.size() == 7);
  }
  SUBCASE("corner of the square") {
    const Mesh m = testing::two_triangle_square();
    CHECK(vertex_patch(m, 1).triangles.size() == 1);
    CHECK(vertex_patch(m, 0).triangles.size() == 2);
  }
  SUBCASE("enlargement") {
    const Mesh m = delaunay_unit_square(86, 1);
    int corner = -1;
    for (int i = 0; i < m.num_vertices(); ++i)
      if (m.vertex(i).norm() < 1e-14) corner = i;
    REQUIRE(corner >= 0);
    Patch p = vertex_patch(m, corner);
    while (p.triangles.size() < 8) p = enlarge(m, p);
    CHECK(p.triangles.size() >= 8);
    for (int layers = 0; layers < 3; ++layers) {
      const Patch a = vertex_patch(m, corner, layers), b = vertex_patch(m, corner, layers + 1);
      CHECK(std::includes(b.triangles.begin(), b.triangles.end(), a.triangles.begin(), a.triangles.end()));
      double area = 0;
      for (int t : b.triangles) area += m.area(t);
      CHECK(b.scale * b.scale == doctest::Approx(area).epsilon(1e-13));
      CHECK(std::is_sorted(b.triangles.begin(), b.triangles.end()));
    }
  }
}

TEST_CASE("parallelogram deviation") {
  const Mesh grid = structured_unit_square(5);
  for (int e = 0; e < grid.num_edges(); ++e) {
    if (grid.is_boundary_edge(e))
      CHECK_THROWS_AS(parallelogram_deviation(grid, e), MeshError);
    else
      CHECK(parallelogram_deviation(grid, e) < 1e-14);
  }

  // move one interior vertex by delta
  const double delta = 0.013;
  std::vector<Point> verts(grid.vertices().begin(), grid.vertices().end());
  int moved = -1;
  for (int i = 0; i < grid.num_vertices(); ++i)
    if ((verts[i] - Point(0.4, 0.6)).norm() < 1e-12) moved = i;
  REQUIRE(moved >= 0);
  verts[moved] += delta * Point(0.6, -0.8);
  const Mesh bent = Mesh::build(verts, {grid.triangles().begin(), grid.triangles().end()});
  double worst = 0;
  for (int e = 0; e < bent.num_edges(); ++e) {
    if (bent.is_boundary_edge(e)) continue;
    const double d = parallelogram_deviation(bent, e);
    CHECK(d <= 2 * delta + 1e-14);
    worst = std::max(worst, d);
  }
  CHECK(worst > 0.1 * delta);

  // the same mesh with the triangles listed in reverse gives the same deviations
  std::vector<std::array<int, 3>> rev(bent.triangles().begin(), bent.triangles().end());
  std::reverse(rev.begin(), rev.end());
  const Mesh swapped = Mesh::build(verts, rev);
  for (int e = 0; e < bent.num_edges(); ++e) {
    if (bent.is_boundary_edge(e)) continue;
    for (int f = 0; f < swapped.num_edges(); ++f)
      if (swapped.edge(f) == bent.edge(e))
        CHECK(parallelogram_deviation(swapped, f) == doctest::Approx(parallelogram_deviation(bent, e)).epsilon(1e-14));
  }
}

TEST_CASE("alpha-beta condition") {
  SUBCASE("uniform grid") {
    for (double alpha : {0.0, 1.0, 5.0}) {
      const auto rep = alpha_beta_report(structured_unit_square(6), alpha, 1.0);
      CHECK(rep.irregular_edges.empty());
      CHECK(rep.irregular_area == 0.0);
    }
  }
  SUBCASE("regular refinement: irregular area shrinks like h") {
    Mesh m = delaunay_unit_square(86, 1);
    std::vector<double> areas;
    for (int level = 0; level < 4; ++level) {
      areas.push_back(alpha_beta_report(m, 1.0, 1.0).irregular_area);
      m = refine_regular(m);
    }
    for (size_t i = 2; i < areas.size(); ++i) CHECK(areas[i] / areas[i - 1] == doctest::Approx(0.5).epsilon(0.15));
  }
  SUBCASE("bisection: irregular area does not vanish") {
    Mesh m = delaunay_unit_square(86, 1);
    std::vector<double> areas;
    for (int level = 0; level < 4; ++level) {
      areas.push_back(alpha_beta_report(m, 0.5, 1.0).irregular_area);
      m = refine_bisection_uniform(m);
    }
    for (size_t i = 1; i < areas.size(); ++i) CHECK(areas[i] > 0.3);
  }
}

TEST_CASE("mesh file round trip") {
  const Mesh m = delaunay_unit_square(86, 4);
  std::stringstream s;
  write_mesh(s, m);
  const Mesh back = read_mesh(s);
  REQUIRE(back.num_triangles() == m.num_triangles());
  for (int v = 0; v < m.num_vertices(); ++v) CHECK(back.vertex(v) == m.vertex(v));
  for (int t = 0; t < m.num_triangles(); ++t) CHECK(back.triangle(t) == m.triangle(t));
  std::istringstream bad("3 1\n0 0\n1 0\n");
  CHECK_THROWS_AS(read_mesh(bad), MeshError);
}
