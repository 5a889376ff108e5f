#pragma once

// Oracles shared by the unit tests. They avoid the library's own topology so
// that mesh bugs cannot hide behind themselves.

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>
#include <utility>
#include <vector>

#include <numbers>

#include <Eigen/Dense>

#include "rtrecover/mesh.hpp"
#include "rtrecover/quadrature.hpp"

namespace testing {

using rtrecover::Mesh;
using rtrecover::Point;

inline int count_edges(const Mesh& m) {
  std::set<std::pair<int, int>> edges;
  for (const auto& t : m.triangles())
    for (int k = 0; k < 3; ++k) {
      int a = t[k], b = t[(k + 1) % 3];
      edges.insert({std::min(a, b), std::max(a, b)});
    }
  return static_cast<int>(edges.size());
}

inline int euler(const Mesh& m) { return m.num_vertices() - count_edges(m) + m.num_triangles(); }

// Brute force: no vertex strictly inside any triangle side.
inline bool conforming(const Mesh& m) {
  for (const auto& t : m.triangles())
    for (int k = 0; k < 3; ++k) {
      const Point a = m.vertex(t[k]), b = m.vertex(t[(k + 1) % 3]);
      const double len2 = (b - a).squaredNorm();
      for (int v = 0; v < m.num_vertices(); ++v) {
        if (v == t[k] || v == t[(k + 1) % 3]) continue;
        const Point p = m.vertex(v);
        const double s = (p - a).dot(b - a) / len2;
        if (s <= 1e-12 || s >= 1 - 1e-12) continue;
        if ((a + s * (b - a) - p).norm() < 1e-12 * std::sqrt(len2)) return false;
      }
    }
  return true;
}

inline double signed_area(const Point& a, const Point& b, const Point& c) {
  return 0.5 * ((b - a).x() * (c - a).y() - (b - a).y() * (c - a).x());
}

inline std::vector<double> sorted_angles(const Point& a, const Point& b, const Point& c) {
  auto ang = [](const Point& p, const Point& q, const Point& r) {
    return std::acos(std::clamp((q - p).normalized().dot((r - p).normalized()), -1.0, 1.0));
  };
  std::vector<double> v = {ang(a, b, c), ang(b, c, a), ang(c, a, b)};
  std::sort(v.begin(), v.end());
  return v;
}

// Random counterclockwise triangle with a bounded aspect ratio.
inline std::array<Point, 3> random_triangle(std::mt19937_64& rng, double min_angle = 0.2) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  while (true) {
    std::array<Point, 3> z = {Point(u(rng), u(rng)), Point(u(rng), u(rng)), Point(u(rng), u(rng))};
    if (signed_area(z[0], z[1], z[2]) < 0) std::swap(z[1], z[2]);
    if (sorted_angles(z[0], z[1], z[2])[0] >= min_angle) return z;
  }
}

inline Mesh two_triangle_square() {
  return Mesh::build({{0, 0}, {1, 0}, {1, 1}, {0, 1}}, {{0, 1, 2}, {0, 2, 3}});
}

// Star of vertex 0 with the given angles (summing to 2 pi) and radii.
inline Mesh star(const std::vector<double>& angles, const std::vector<double>& radii, double phase = 0.0) {
  std::vector<Point> v = {Point(0, 0)};
  double phi = phase;
  for (size_t i = 0; i < angles.size(); ++i) {
    v.emplace_back(radii[i] * std::cos(phi), radii[i] * std::sin(phi));
    phi += angles[i];
  }
  std::vector<std::array<int, 3>> t;
  const int n = static_cast<int>(angles.size());
  for (int i = 0; i < n; ++i) t.push_back({0, 1 + i, 1 + (i + 1) % n});
  return Mesh::build(v, t);
}

inline Mesh random_star(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> count(3, 9);
  while (true) {
    const int n = count(rng);
    std::vector<double> w(n), radii(n);
    double sum = 0;
    for (auto& x : w) sum += (x = 0.05 + u(rng));
    bool ok = true;
    for (auto& x : w) {
      x *= 2 * std::numbers::pi / sum;
      ok = ok && x < std::numbers::pi - 0.05;
    }
    for (auto& r : radii) r = 0.3 + 1.2 * u(rng);
    if (ok) return star(w, radii, 2 * std::numbers::pi * u(rng));
  }
}

// The functionals written out for r = 0, 1: q(g_j).n_e on every edge and,
// for r = 1, the component means over every triangle.
inline Eigen::MatrixXd direct_matrix(const Mesh& m, int r, const Point& z, double h) {
  const int M = (r + 2) * (r + 3) / 2;
  auto mono = [&](const Point& x) {
    const Point y = (x - z) / h;
    Eigen::VectorXd v(M);
    int i = 0;
    for (int d = 0; d <= r + 1; ++d)
      for (int b = 0; b <= d; ++b) v(i++) = std::pow(y.x(), d - b) * std::pow(y.y(), b);
    return v;
  };
  std::vector<Eigen::RowVectorXd> rows;
  const auto& gauss = rtrecover::edge_gauss(r + 1);
  for (int e = 0; e < m.num_edges(); ++e) {
    const Point a = m.vertex(m.edge(e)[0]), b = m.vertex(m.edge(e)[1]);
    const Point t = (b - a).normalized();
    const Point n(t.y(), -t.x());
    for (int j = 0; j <= r; ++j) {
      const auto v = mono(a + gauss.points[j] * (b - a));
      Eigen::RowVectorXd row(2 * M);
      row << n.x() * v.transpose(), n.y() * v.transpose();
      rows.push_back(row);
    }
  }
  if (r == 1)
    for (int t = 0; t < m.num_triangles(); ++t) {
      const auto g = rtrecover::geometry(m, t);
      Eigen::VectorXd mean = Eigen::VectorXd::Zero(M);
      const auto& rule = rtrecover::triangle_rule(2);
      for (int q = 0; q < rule.size(); ++q) mean += rule.weights[q] * mono(g.from_barycentric(rule.points[q]));
      Eigen::RowVectorXd rx = Eigen::RowVectorXd::Zero(2 * M), ry = rx;
      rx.head(M) = mean.transpose();
      ry.tail(M) = mean.transpose();
      rows.push_back(rx);
      rows.push_back(ry);
    }
  Eigen::MatrixXd A(rows.size(), 2 * M);
  for (size_t i = 0; i < rows.size(); ++i) A.row(i) = rows[i];
  return A;
}

}  // namespace testing
