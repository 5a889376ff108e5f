#include "rtrecover/mesh_generators.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <unordered_map>

namespace rtrecover {
namespace {

struct Circle {
  Point center;
  double radius2;
};

Circle circumcircle(const Point& a, const Point& b, const Point& c) {
  const double d = 2.0 * (a.x() * (b.y() - c.y()) + b.x() * (c.y() - a.y()) + c.x() * (a.y() - b.y()));
  const double a2 = a.squaredNorm(), b2 = b.squaredNorm(), c2 = c.squaredNorm();
  const Point center((a2 * (b.y() - c.y()) + b2 * (c.y() - a.y()) + c2 * (a.y() - b.y())) / d,
                     (a2 * (c.x() - b.x()) + b2 * (a.x() - c.x()) + c2 * (b.x() - a.x())) / d);
  return {center, (a - center).squaredNorm()};
}

double orient(const Point& a, const Point& b, const Point& c) {
  return (b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x());
}

// Uniform double in [0, 1) from the top 53 bits of a 64-bit draw.
double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace

std::vector<std::array<int, 3>> delaunay_triangulate(const std::vector<Point>& points) {
  const int n = static_cast<int>(points.size());
  if (n < 3) throw MeshError("need at least 3 points");
  Point lo = points[0], hi = points[0];
  for (const auto& p : points) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  const Point mid = 0.5 * (lo + hi);
  const double span = std::max(hi.x() - lo.x(), hi.y() - lo.y());
  std::vector<Point> pts = points;
  pts.push_back(mid + Point(-100.0 * span, -100.0 * span));
  pts.push_back(mid + Point(100.0 * span, -100.0 * span));
  pts.push_back(mid + Point(0.0, 100.0 * span));

  struct Tri {
    std::array<int, 3> v;
    Circle c;
  };
  auto make = [&](int a, int b, int c) {
    if (orient(pts[a], pts[b], pts[c]) < 0) std::swap(b, c);
    return Tri{{a, b, c}, circumcircle(pts[a], pts[b], pts[c])};
  };
  std::vector<Tri> tris{make(n, n + 1, n + 2)};

  for (int p = 0; p < n; ++p) {
    const Point& x = pts[p];
    std::vector<Tri> keep;
    std::vector<std::array<int, 2>> boundary;
    std::unordered_map<std::uint64_t, int> edge_count;
    std::vector<std::array<int, 2>> cavity_edges;
    for (const Tri& t : tris) {
      const double d2 = (x - t.c.center).squaredNorm();
      if (d2 < t.c.radius2 * (1.0 - 1e-12)) {
        for (int k = 0; k < 3; ++k) {
          const int a = t.v[(k + 1) % 3], b = t.v[(k + 2) % 3];
          const std::uint64_t key = (static_cast<std::uint64_t>(std::min(a, b)) << 32) |
                                    static_cast<std::uint32_t>(std::max(a, b));
          ++edge_count[key];
          cavity_edges.push_back({a, b});
        }
      } else {
        keep.push_back(t);
      }
    }
    for (const auto& e : cavity_edges) {
      const std::uint64_t key = (static_cast<std::uint64_t>(std::min(e[0], e[1])) << 32) |
                                static_cast<std::uint32_t>(std::max(e[0], e[1]));
      if (edge_count[key] == 1) {
        if (std::abs(orient(pts[e[0]], pts[e[1]], x)) <= 1e-14 * span * span)
          throw MeshError("Delaunay insertion produced a degenerate triangle");
        keep.push_back(make(e[0], e[1], p));
      }
    }
    tris = std::move(keep);
  }

  std::vector<std::array<int, 3>> out;
  for (const Tri& t : tris)
    if (t.v[0] < n && t.v[1] < n && t.v[2] < n) out.push_back(t.v);
  return out;
}

Mesh delaunay_unit_square(int target_nt, std::uint64_t seed) {
  if (target_nt < 2) throw std::invalid_argument("target triangle count too small");
  const double s = std::sqrt(4.0 / (std::sqrt(3.0) * target_nt));
  const int m = std::max(1, static_cast<int>(std::lround(1.0 / s)));
  const int interior = std::max(0, (target_nt - 4 * m + 2 + 1) / 2);

  std::vector<Point> pts;
  for (int i = 0; i < m; ++i) {
    const double u = static_cast<double>(i) / m;
    pts.emplace_back(u, 0.0);
    pts.emplace_back(1.0, u);
    pts.emplace_back(1.0 - u, 1.0);
    pts.emplace_back(0.0, 1.0 - u);
  }

  std::mt19937_64 rng(seed);
  double spacing = 0.75 * s;
  const double margin = 0.4 * s;
  while (static_cast<int>(pts.size()) < 4 * m + interior) {
    bool placed = false;
    for (int attempt = 0; attempt < 20000 && !placed; ++attempt) {
      const Point p(margin + (1.0 - 2.0 * margin) * uniform01(rng),
                    margin + (1.0 - 2.0 * margin) * uniform01(rng));
      bool ok = true;
      for (const auto& q : pts) {
        if ((p - q).squaredNorm() < spacing * spacing) {
          ok = false;
          break;
        }
      }
      if (ok) {
        pts.push_back(p);
        placed = true;
      }
    }
    if (!placed) spacing *= 0.9;
  }

  auto tris = delaunay_triangulate(pts);
  const int expected = 2 * interior + 4 * m - 2;
  if (static_cast<int>(tris.size()) != expected)
    throw MeshError("Delaunay mesh has " + std::to_string(tris.size()) + " triangles, expected " +
                    std::to_string(expected));
  return Mesh::build(std::move(pts), std::move(tris));
}

Mesh structured_unit_square(int n) {
  if (n < 1) throw std::invalid_argument("grid size must be positive");
  std::vector<Point> pts;
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i) pts.emplace_back(static_cast<double>(i) / n, static_cast<double>(j) / n);
  std::vector<std::array<int, 3>> tris;
  auto id = [n](int i, int j) { return j * (n + 1) + i; };
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      tris.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
      tris.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
    }
  }
  return Mesh::build(std::move(pts), std::move(tris));
}

double slit_angle() { return std::numbers::pi / 24.0; }

Mesh slit_square(int min_nt) {
  // O A F G E H D K C B
  std::vector<Point> pts{{0, 0}, {1, 0}, {1, -1}, {0, -1}, {-1, -1},
                         {-1, 0}, {-1, 1}, {0, 1}, {1, 1}, {1, std::tan(slit_angle())}};
  enum { O, A, F, G, E, H, D, K, C, B };
  std::vector<std::array<int, 3>> tris{{O, H, E}, {O, E, G}, {O, G, F}, {O, F, A},
                                       {O, B, C}, {O, C, K}, {O, K, D}, {O, D, H}};
  Mesh mesh = Mesh::build(std::move(pts), std::move(tris));
  while (mesh.num_triangles() < min_nt) mesh = refine_regular(mesh);
  return mesh;
}

}  // namespace rtrecover
