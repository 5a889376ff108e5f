#include "rtrecover/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>
#include <unordered_map>

namespace rtrecover {
namespace {

double cross(const Point& a, const Point& b) { return a.x() * b.y() - a.y() * b.x(); }

double signed_double_area(const Point& a, const Point& b, const Point& c) {
  return cross(b - a, c - a);
}

std::uint64_t edge_key(int a, int b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint32_t>(b);
}

int longest_edge(const std::vector<Point>& verts, const std::array<int, 3>& tri) {
  int best = 0;
  double best_len = -1.0;
  for (int k = 0; k < 3; ++k) {
    const double len =
        (verts[tri[(k + 2) % 3]] - verts[tri[(k + 1) % 3]]).squaredNorm();
    const double tol = 1e-12 * std::max(len, best_len);
    if (len > best_len + tol ||
        (std::abs(len - best_len) <= tol && tri[k] < tri[best])) {
      best = k;
      best_len = std::max(len, best_len);
    }
  }
  return best;
}

}  // namespace

Mesh Mesh::build(std::vector<Point> vertices, std::vector<std::array<int, 3>> triangles,
                 std::vector<int> refinement_edges, std::vector<int> parents) {
  const int nv = static_cast<int>(vertices.size());
  const int nt = static_cast<int>(triangles.size());
  if (nt == 0) throw MeshError("mesh has no triangles");
  if (!refinement_edges.empty() && static_cast<int>(refinement_edges.size()) != nt)
    throw MeshError("refinement edge list has wrong length");
  if (!parents.empty() && static_cast<int>(parents.size()) != nt)
    throw MeshError("parent list has wrong length");

  for (int t = 0; t < nt; ++t) {
    auto& tri = triangles[t];
    for (int k = 0; k < 3; ++k) {
      if (tri[k] < 0 || tri[k] >= nv)
        throw MeshError("triangle " + std::to_string(t) + ": vertex index out of range");
    }
    if (tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2])
      throw MeshError("triangle " + std::to_string(t) + ": duplicate vertex index");
    const Point& a = vertices[tri[0]];
    const Point& b = vertices[tri[1]];
    const Point& c = vertices[tri[2]];
    const double area2 = signed_double_area(a, b, c);
    const double scale = std::max({(b - a).squaredNorm(), (c - b).squaredNorm(),
                                   (a - c).squaredNorm()});
    if (!(std::abs(area2) > 1e-14 * scale))
      throw MeshError("triangle " + std::to_string(t) + ": zero area");
    if (area2 < 0) {
      std::swap(tri[1], tri[2]);
      if (!refinement_edges.empty()) {
        int& k = refinement_edges[t];
        if (k == 1) k = 2;
        else if (k == 2) k = 1;
      }
    }
  }

  Mesh mesh;
  mesh.vertices_ = std::move(vertices);
  mesh.triangles_ = std::move(triangles);
  if (refinement_edges.empty()) {
    refinement_edges.resize(nt);
    for (int t = 0; t < nt; ++t)
      refinement_edges[t] = longest_edge(mesh.vertices_, mesh.triangles_[t]);
  }
  for (int k : refinement_edges) {
    if (k < 0 || k > 2) throw MeshError("refinement edge index must be 0, 1 or 2");
  }
  mesh.refinement_edges_ = std::move(refinement_edges);
  if (parents.empty()) parents.assign(nt, -1);
  mesh.parents_ = std::move(parents);
  mesh.build_topology();
  validate(mesh);
  return mesh;
}

void Mesh::build_topology() {
  const int nt = num_triangles();
  const int nv = num_vertices();
  std::unordered_map<std::uint64_t, int> lookup;
  lookup.reserve(static_cast<std::size_t>(nt) * 2);
  triangle_edges_.assign(nt, {-1, -1, -1});
  edge_signs_.assign(nt, {0, 0, 0});
  edges_.clear();
  edge_triangles_.clear();

  for (int t = 0; t < nt; ++t) {
    const auto& tri = triangles_[t];
    for (int k = 0; k < 3; ++k) {
      const int a = tri[(k + 1) % 3];
      const int b = tri[(k + 2) % 3];
      const auto key = edge_key(a, b);
      auto [it, inserted] = lookup.try_emplace(key, static_cast<int>(edges_.size()));
      const int e = it->second;
      if (inserted) {
        edges_.push_back({std::min(a, b), std::max(a, b)});
        edge_triangles_.push_back({t, -1});
      } else {
        auto& inc = edge_triangles_[e];
        if (inc[1] >= 0)
          throw MeshError("non-manifold edge (" + std::to_string(edges_[e][0]) + ", " +
                          std::to_string(edges_[e][1]) + ")");
        inc[1] = t;
      }
      triangle_edges_[t][k] = e;
      // Walking the triangle counterclockwise traverses a -> b. The global
      // normal is outward exactly when the global direction low -> high agrees.
      edge_signs_[t][k] = a < b ? 1 : -1;
    }
  }

  num_interior_edges_ = 0;
  boundary_vertex_.assign(nv, 0);
  for (int e = 0; e < num_edges(); ++e) {
    if (edge_triangles_[e][1] >= 0) {
      ++num_interior_edges_;
    } else {
      boundary_vertex_[edges_[e][0]] = 1;
      boundary_vertex_[edges_[e][1]] = 1;
    }
  }

  vertex_triangle_offsets_.assign(nv + 1, 0);
  for (const auto& tri : triangles_)
    for (int v : tri) ++vertex_triangle_offsets_[v + 1];
  std::partial_sum(vertex_triangle_offsets_.begin(), vertex_triangle_offsets_.end(),
                   vertex_triangle_offsets_.begin());
  vertex_triangle_list_.assign(vertex_triangle_offsets_.back(), -1);
  std::vector<int> fill(vertex_triangle_offsets_.begin(), vertex_triangle_offsets_.end() - 1);
  for (int t = 0; t < nt; ++t)
    for (int v : triangles_[t]) vertex_triangle_list_[fill[v]++] = t;
}

std::span<const int> Mesh::vertex_triangles(int v) const {
  const int begin = vertex_triangle_offsets_[v];
  const int end = vertex_triangle_offsets_[v + 1];
  return {vertex_triangle_list_.data() + begin, static_cast<std::size_t>(end - begin)};
}

double Mesh::area(int t) const {
  const auto& tri = triangles_[t];
  return 0.5 * signed_double_area(vertices_[tri[0]], vertices_[tri[1]], vertices_[tri[2]]);
}

double Mesh::edge_length(int e) const {
  return (vertices_[edges_[e][1]] - vertices_[edges_[e][0]]).norm();
}

Point Mesh::edge_midpoint(int e) const {
  return 0.5 * (vertices_[edges_[e][0]] + vertices_[edges_[e][1]]);
}

Point Mesh::edge_tangent(int e) const {
  return (vertices_[edges_[e][1]] - vertices_[edges_[e][0]]).normalized();
}

Point Mesh::edge_normal(int e) const {
  const Point t = edge_tangent(e);
  return {t.y(), -t.x()};
}

double Mesh::mesh_size() const {
  double h = 0.0;
  for (int t = 0; t < num_triangles(); ++t) h = std::max(h, std::sqrt(area(t)));
  return h;
}

double Mesh::total_area() const {
  double a = 0.0;
  for (int t = 0; t < num_triangles(); ++t) a += area(t);
  return a;
}

double Mesh::min_angle() const {
  double m = std::numeric_limits<double>::infinity();
  for (int t = 0; t < num_triangles(); ++t) {
    const auto g = geometry(*this, t);
    m = std::min({m, g.angles[0], g.angles[1], g.angles[2]});
  }
  return m;
}

int Mesh::local_edge_index(int t, int e) const {
  const auto& te = triangle_edges_[t];
  for (int k = 0; k < 3; ++k)
    if (te[k] == e) return k;
  return -1;
}

void validate(const Mesh& mesh) {
  const int nt = mesh.num_triangles();
  for (int t = 0; t < nt; ++t) {
    if (!(mesh.area(t) > 0.0))
      throw MeshError("triangle " + std::to_string(t) + " is not counterclockwise");
  }
  for (int e = 0; e < mesh.num_edges(); ++e) {
    const auto& inc = mesh.edge_triangles(e);
    if (inc[0] < 0) throw MeshError("edge without triangles");
    if (inc[1] >= 0) {
      const int k0 = mesh.local_edge_index(inc[0], e);
      const int k1 = mesh.local_edge_index(inc[1], e);
      if (mesh.edge_sign(inc[0], k0) == mesh.edge_sign(inc[1], k1))
        throw MeshError("triangles sharing edge " + std::to_string(e) + " overlap");
    }
  }

  // Conformity: a hanging vertex sits in the interior of an edge that then
  // has only one incident triangle, so only boundary edges need checking.
  const int nv = mesh.num_vertices();
  Point lo = mesh.vertex(0), hi = mesh.vertex(0);
  for (const Point& p : mesh.vertices()) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  const int cells = std::max(1, static_cast<int>(std::sqrt(static_cast<double>(nv))));
  const Point extent = (hi - lo).cwiseMax(Point(1e-300, 1e-300));
  auto cell_of = [&](const Point& p) {
    const int i = std::clamp(static_cast<int>((p.x() - lo.x()) / extent.x() * cells), 0, cells - 1);
    const int j = std::clamp(static_cast<int>((p.y() - lo.y()) / extent.y() * cells), 0, cells - 1);
    return std::pair{i, j};
  };
  std::vector<std::vector<int>> buckets(static_cast<std::size_t>(cells) * cells);
  for (int v = 0; v < nv; ++v) {
    const auto [i, j] = cell_of(mesh.vertex(v));
    buckets[static_cast<std::size_t>(i) * cells + j].push_back(v);
  }
  for (int e = 0; e < mesh.num_edges(); ++e) {
    if (!mesh.is_boundary_edge(e)) continue;
    const auto [a, b] = mesh.edge(e);
    const Point& pa = mesh.vertex(a);
    const Point& pb = mesh.vertex(b);
    const double len2 = (pb - pa).squaredNorm();
    const auto [i0, j0] = cell_of(pa.cwiseMin(pb));
    const auto [i1, j1] = cell_of(pa.cwiseMax(pb));
    for (int i = i0; i <= i1; ++i) {
      for (int j = j0; j <= j1; ++j) {
        for (int v : buckets[static_cast<std::size_t>(i) * cells + j]) {
          if (v == a || v == b) continue;
          const Point d = mesh.vertex(v) - pa;
          const double s = d.dot(pb - pa) / len2;
          if (s <= 1e-12 || s >= 1.0 - 1e-12) continue;
          const double dist2 = (d - s * (pb - pa)).squaredNorm();
          if (dist2 <= 1e-20 * len2)
            throw MeshError("hanging vertex " + std::to_string(v) + " on edge " +
                            std::to_string(e));
        }
      }
    }
  }

  const int euler = mesh.num_vertices() - mesh.num_edges() + mesh.num_triangles();
  if (euler != 1)
    throw MeshError("Euler characteristic is " + std::to_string(euler) +
                    " (expected 1 for a simply connected domain)");
}

TriangleGeometry TriangleGeometry::from_vertices(const Point& a, const Point& b, const Point& c) {
  TriangleGeometry g;
  g.vertices = {a, b, c};
  g.area = 0.5 * signed_double_area(a, b, c);
  for (int k = 0; k < 3; ++k) {
    const Point& from = g.vertices[(k + 1) % 3];
    const Point& to = g.vertices[(k + 2) % 3];
    g.lengths[k] = (to - from).norm();
    g.tangents[k] = (to - from) / g.lengths[k];
    g.normals[k] = Point(g.tangents[k].y(), -g.tangents[k].x());
    g.altitudes[k] = 2.0 * g.area / g.lengths[k];
    g.grad_lambda[k] = -g.normals[k] / g.altitudes[k];
  }
  for (int k = 0; k < 3; ++k) {
    const Point u = g.vertices[(k + 1) % 3] - g.vertices[k];
    const Point v = g.vertices[(k + 2) % 3] - g.vertices[k];
    g.angles[k] = std::atan2(std::abs(cross(u, v)), u.dot(v));
  }
  g.circumdiameter = g.lengths[0] * g.lengths[1] * g.lengths[2] / (2.0 * g.area);
  return g;
}

double TriangleGeometry::diameter() const {
  return std::max({lengths[0], lengths[1], lengths[2]});
}

std::array<double, 3> TriangleGeometry::barycentric(const Point& x) const {
  std::array<double, 3> lambda{};
  for (int k = 0; k < 3; ++k)
    lambda[k] = grad_lambda[k].dot(x - vertices[(k + 1) % 3]);
  return lambda;
}

Point TriangleGeometry::from_barycentric(const std::array<double, 3>& lambda) const {
  return lambda[0] * vertices[0] + lambda[1] * vertices[1] + lambda[2] * vertices[2];
}

TriangleGeometry geometry(const Mesh& mesh, int t) {
  const auto& tri = mesh.triangle(t);
  return TriangleGeometry::from_vertices(mesh.vertex(tri[0]), mesh.vertex(tri[1]),
                                         mesh.vertex(tri[2]));
}

namespace {

Patch make_patch(const Mesh& mesh, PatchCenter kind, int center, std::vector<int> tris,
                 int layers) {
  Patch p;
  p.center_kind = kind;
  p.center = center;
  p.layers = layers;
  std::sort(tris.begin(), tris.end());
  tris.erase(std::unique(tris.begin(), tris.end()), tris.end());
  double area = 0.0;
  for (int t : tris) {
    area += mesh.area(t);
    for (int k = 0; k < 3; ++k) {
      p.edges.push_back(mesh.triangle_edges(t)[k]);
      p.vertices.push_back(mesh.triangle(t)[k]);
    }
  }
  std::sort(p.edges.begin(), p.edges.end());
  p.edges.erase(std::unique(p.edges.begin(), p.edges.end()), p.edges.end());
  std::sort(p.vertices.begin(), p.vertices.end());
  p.vertices.erase(std::unique(p.vertices.begin(), p.vertices.end()), p.vertices.end());
  p.triangles = std::move(tris);
  p.scale = std::sqrt(area);
  return p;
}

}  // namespace

Patch enlarge(const Mesh& mesh, const Patch& patch) {
  std::vector<int> tris;
  for (int v : patch.vertices) {
    const auto star = mesh.vertex_triangles(v);
    tris.insert(tris.end(), star.begin(), star.end());
  }
  return make_patch(mesh, patch.center_kind, patch.center, std::move(tris), patch.layers + 1);
}

Patch vertex_patch(const Mesh& mesh, int z, int extra_layers) {
  const auto star = mesh.vertex_triangles(z);
  Patch p = make_patch(mesh, PatchCenter::kVertex, z, {star.begin(), star.end()}, 0);
  for (int i = 0; i < extra_layers; ++i) p = enlarge(mesh, p);
  return p;
}

Patch edge_patch(const Mesh& mesh, int e) {
  std::vector<int> tris;
  for (int t : mesh.edge_triangles(e))
    if (t >= 0) tris.push_back(t);
  return make_patch(mesh, PatchCenter::kEdge, e, std::move(tris), 0);
}

Patch triangle_patch(const Mesh& mesh, int t) {
  std::vector<int> tris;
  for (int v : mesh.triangle(t)) {
    const auto star = mesh.vertex_triangles(v);
    tris.insert(tris.end(), star.begin(), star.end());
  }
  return make_patch(mesh, PatchCenter::kTriangle, t, std::move(tris), 0);
}

double parallelogram_deviation(const Mesh& mesh, int e) {
  const auto& inc = mesh.edge_triangles(e);
  if (inc[1] < 0)
    throw MeshError("edge " + std::to_string(e) + " is on the boundary");
  const int k = mesh.local_edge_index(inc[0], e);
  const int kp = mesh.local_edge_index(inc[1], e);
  double dev = 0.0;
  for (int step = 1; step <= 2; ++step) {
    const int ei = mesh.triangle_edges(inc[0])[(k + step) % 3];
    const int ej = mesh.triangle_edges(inc[1])[(kp + step) % 3];
    dev = std::max(dev, std::abs(mesh.edge_length(ei) - mesh.edge_length(ej)));
  }
  return dev;
}

AlphaBetaReport alpha_beta_report(const Mesh& mesh, double alpha, double c) {
  if (alpha < 0 || c <= 0) throw std::invalid_argument("alpha_beta_report: need alpha >= 0, c > 0");
  AlphaBetaReport report;
  const double threshold = c * std::pow(mesh.mesh_size(), 1.0 + alpha);
  std::vector<char> touched(mesh.num_triangles(), 0);
  for (int e = 0; e < mesh.num_edges(); ++e) {
    if (mesh.is_boundary_edge(e)) continue;
    if (parallelogram_deviation(mesh, e) <= threshold) {
      report.parallel_edges.push_back(e);
    } else {
      report.irregular_edges.push_back(e);
      for (int t : mesh.edge_triangles(e)) touched[t] = 1;
    }
  }
  for (int t = 0; t < mesh.num_triangles(); ++t)
    if (touched[t]) report.irregular_area += mesh.area(t);
  return report;
}

namespace {

void close_marks(const Mesh& mesh, std::vector<char>& marks, int max_depth) {
  std::vector<int> frontier;
  for (int e = 0; e < mesh.num_edges(); ++e)
    if (marks[e]) frontier.push_back(e);
  int depth = 0;
  while (!frontier.empty()) {
    if (++depth > max_depth)
      throw MeshError("bisection closure exceeded depth " + std::to_string(max_depth));
    std::vector<int> next;
    for (int e : frontier) {
      for (int t : mesh.edge_triangles(e)) {
        if (t < 0) continue;
        const int ref = mesh.triangle_edges(t)[mesh.refinement_edge(t)];
        if (!marks[ref]) {
          marks[ref] = 1;
          next.push_back(ref);
        }
      }
    }
    frontier = std::move(next);
  }
}

// Splits every triangle according to its marked edges. A triangle with all
// three edges marked is refined regularly when `red_when_full` is set and by
// two levels of bisection otherwise.
Mesh split_marked(const Mesh& mesh, const std::vector<char>& marks, bool red_when_full) {
  std::vector<Point> verts(mesh.vertices().begin(), mesh.vertices().end());
  std::vector<int> mid(mesh.num_edges(), -1);
  for (int e = 0; e < mesh.num_edges(); ++e) {
    if (!marks[e]) continue;
    mid[e] = static_cast<int>(verts.size());
    verts.push_back(mesh.edge_midpoint(e));
  }

  std::vector<std::array<int, 3>> tris;
  std::vector<int> refs;
  std::vector<int> parents;
  tris.reserve(static_cast<std::size_t>(mesh.num_triangles()) * 2);
  auto emit = [&](std::array<int, 3> tri, int ref, int parent) {
    tris.push_back(tri);
    refs.push_back(ref);
    parents.push_back(parent);
  };

  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto& tri = mesh.triangle(t);
    const auto& te = mesh.triangle_edges(t);
    const int count = marks[te[0]] + marks[te[1]] + marks[te[2]];
    const int rk = mesh.refinement_edge(t);
    if (count == 0) {
      emit(tri, rk, t);
      continue;
    }
    if (count == 3 && red_when_full) {
      const int m0 = mid[te[0]], m1 = mid[te[1]], m2 = mid[te[2]];
      emit({tri[0], m2, m1}, rk, t);
      emit({m2, tri[1], m0}, rk, t);
      emit({m1, m0, tri[2]}, rk, t);
      emit({m0, m1, m2}, rk, t);
      continue;
    }
    if (!marks[te[rk]])
      throw MeshError("triangle " + std::to_string(t) +
                      " has a marked edge but an unmarked refinement edge");
    const int v0 = tri[rk], v1 = tri[(rk + 1) % 3], v2 = tri[(rk + 2) % 3];
    const int e1 = te[(rk + 1) % 3];  // v2 - v0
    const int e2 = te[(rk + 2) % 3];  // v0 - v1
    const int m = mid[te[rk]];
    if (marks[e2]) {
      emit({mid[e2], m, v0}, 0, t);
      emit({mid[e2], v1, m}, 0, t);
    } else {
      emit({m, v0, v1}, 0, t);
    }
    if (marks[e1]) {
      emit({mid[e1], m, v2}, 0, t);
      emit({mid[e1], v0, m}, 0, t);
    } else {
      emit({m, v2, v0}, 0, t);
    }
  }
  return Mesh::build(std::move(verts), std::move(tris), std::move(refs), std::move(parents));
}

}  // namespace

Mesh refine_regular(const Mesh& mesh) {
  return split_marked(mesh, std::vector<char>(mesh.num_edges(), 1), true);
}

Mesh refine_bisection(const Mesh& mesh, std::span<const int> marked,
                      const BisectionOptions& options) {
  if (options.bisections_per_mark != 1 && options.bisections_per_mark != 2)
    throw std::invalid_argument("bisections_per_mark must be 1 or 2");
  std::vector<char> marks(mesh.num_edges(), 0);
  for (int t : marked) {
    if (t < 0 || t >= mesh.num_triangles()) throw MeshError("marked triangle out of range");
    if (options.bisections_per_mark == 2) {
      for (int e : mesh.triangle_edges(t)) marks[e] = 1;
    } else {
      marks[mesh.triangle_edges(t)[mesh.refinement_edge(t)]] = 1;
    }
  }
  close_marks(mesh, marks, options.max_closure_depth);
  return split_marked(mesh, marks, false);
}

Mesh refine_bisection_uniform(const Mesh& mesh) {
  std::vector<int> all(mesh.num_triangles());
  std::iota(all.begin(), all.end(), 0);
  return refine_bisection(mesh, all, {.bisections_per_mark = 2});
}

Mesh refine_adaptive(const Mesh& mesh, std::span<const int> marked, int max_closure_depth) {
  std::vector<char> marks(mesh.num_edges(), 0);
  for (int t : marked) {
    if (t < 0 || t >= mesh.num_triangles()) throw MeshError("marked triangle out of range");
    for (int e : mesh.triangle_edges(t)) marks[e] = 1;
  }
  close_marks(mesh, marks, max_closure_depth);
  return split_marked(mesh, marks, true);
}

Mesh read_mesh(std::istream& in) {
  int nv = 0, nt = 0;
  if (!(in >> nv >> nt) || nv <= 0 || nt <= 0) throw MeshError("bad mesh header");
  std::vector<Point> verts(nv);
  for (auto& p : verts)
    if (!(in >> p.x() >> p.y())) throw MeshError("truncated vertex list");
  std::vector<std::array<int, 3>> tris(nt);
  for (auto& t : tris)
    if (!(in >> t[0] >> t[1] >> t[2])) throw MeshError("truncated triangle list");
  return Mesh::build(std::move(verts), std::move(tris));
}

Mesh read_mesh_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MeshError("cannot open mesh file " + path);
  return read_mesh(in);
}

void write_mesh(std::ostream& out, const Mesh& mesh) {
  std::ostringstream buf;
  buf.precision(17);
  buf << mesh.num_vertices() << ' ' << mesh.num_triangles() << '\n';
  for (const Point& p : mesh.vertices()) buf << p.x() << ' ' << p.y() << '\n';
  for (const auto& t : mesh.triangles()) buf << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  out << buf.str();
}

void write_mesh_file(const std::string& path, const Mesh& mesh) {
  std::ofstream out(path);
  if (!out) throw MeshError("cannot write mesh file " + path);
  write_mesh(out, mesh);
}

}  // namespace rtrecover
