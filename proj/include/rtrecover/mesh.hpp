#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace rtrecover {

using Point = Eigen::Vector2d;

class MeshError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Conforming triangulation of a simply connected polygon.
///
/// Triangles are stored counterclockwise. Local edge k of a triangle is the
/// edge opposite its local vertex k. Global edges run from the lower vertex
/// index to the higher one; the global unit normal is the tangent rotated by
/// -pi/2. Each triangle carries a refinement edge (a local edge index) used by
/// newest-vertex bisection, and the index of the triangle it was refined from.
///
/// A Mesh is immutable once built; refinement returns a new Mesh.
class Mesh {
 public:
  /// Builds and validates a mesh. Clockwise triangles are reordered. When
  /// `refinement_edges` is empty the longest edge of each triangle is used
  /// (ties go to the lowest opposite vertex index).
  static Mesh build(std::vector<Point> vertices,
                    std::vector<std::array<int, 3>> triangles,
                    std::vector<int> refinement_edges = {},
                    std::vector<int> parents = {});

  int num_vertices() const { return static_cast<int>(vertices_.size()); }
  int num_edges() const { return static_cast<int>(edges_.size()); }
  int num_triangles() const { return static_cast<int>(triangles_.size()); }
  int num_interior_edges() const { return num_interior_edges_; }

  const Point& vertex(int v) const { return vertices_[v]; }
  std::span<const Point> vertices() const { return vertices_; }
  const std::array<int, 3>& triangle(int t) const { return triangles_[t]; }
  std::span<const std::array<int, 3>> triangles() const { return triangles_; }
  /// Endpoints (low, high) of a global edge.
  const std::array<int, 2>& edge(int e) const { return edges_[e]; }
  /// Global edge index of local edge k (opposite local vertex k).
  const std::array<int, 3>& triangle_edges(int t) const { return triangle_edges_[t]; }
  /// Incident triangles of an edge; the second entry is -1 on the boundary.
  const std::array<int, 2>& edge_triangles(int e) const { return edge_triangles_[e]; }
  bool is_boundary_edge(int e) const { return edge_triangles_[e][1] < 0; }
  bool is_boundary_vertex(int v) const { return boundary_vertex_[v] != 0; }
  /// +1 if the global normal of local edge k points out of triangle t.
  int edge_sign(int t, int k) const { return edge_signs_[t][k]; }
  int refinement_edge(int t) const { return refinement_edges_[t]; }
  int parent(int t) const { return parents_[t]; }
  /// Triangles sharing vertex v, sorted by index.
  std::span<const int> vertex_triangles(int v) const;

  double area(int t) const;
  double edge_length(int e) const;
  Point edge_midpoint(int e) const;
  Point edge_tangent(int e) const;
  Point edge_normal(int e) const;
  /// Largest h_T = |T|^{1/2}.
  double mesh_size() const;
  double total_area() const;
  double min_angle() const;

  /// Local index (0..2) of global edge e in triangle t, or -1.
  int local_edge_index(int t, int e) const;

 private:
  Mesh() = default;
  void build_topology();

  std::vector<Point> vertices_;
  std::vector<std::array<int, 3>> triangles_;
  std::vector<std::array<int, 2>> edges_;
  std::vector<std::array<int, 3>> triangle_edges_;
  std::vector<std::array<int, 2>> edge_triangles_;
  std::vector<std::array<int, 3>> edge_signs_;
  std::vector<int> refinement_edges_;
  std::vector<int> parents_;
  std::vector<char> boundary_vertex_;
  std::vector<int> vertex_triangle_offsets_;
  std::vector<int> vertex_triangle_list_;
  int num_interior_edges_ = 0;
};

/// Checks every structural invariant: positive orientation, edge incidence,
/// conformity (no vertex in the interior of a boundary edge), and the Euler
/// relation V - E + T = 1. Throws MeshError on the first violation.
void validate(const Mesh& mesh);

/// Geometric quantities of one triangle. Index k refers to the edge opposite
/// vertex k; tangents run counterclockwise and normals point outward.
struct TriangleGeometry {
  std::array<Point, 3> vertices;
  std::array<double, 3> lengths{};
  std::array<double, 3> angles{};
  std::array<double, 3> altitudes{};
  double circumdiameter = 0.0;
  std::array<Point, 3> tangents;
  std::array<Point, 3> normals;
  double area = 0.0;
  std::array<Point, 3> grad_lambda;

  static TriangleGeometry from_vertices(const Point& a, const Point& b, const Point& c);

  Point centroid() const { return (vertices[0] + vertices[1] + vertices[2]) / 3.0; }
  double diameter() const;
  std::array<double, 3> barycentric(const Point& x) const;
  Point from_barycentric(const std::array<double, 3>& lambda) const;
};

TriangleGeometry geometry(const Mesh& mesh, int t);

enum class PatchCenter { kVertex, kEdge, kTriangle };

struct Patch {
  PatchCenter center_kind = PatchCenter::kVertex;
  int center = -1;
  std::vector<int> triangles;
  std::vector<int> edges;
  std::vector<int> vertices;
  /// |omega|^{1/2}
  double scale = 0.0;
  int layers = 0;
};

/// Star of vertex z plus `extra_layers` rings of vertex neighbours.
Patch vertex_patch(const Mesh& mesh, int z, int extra_layers = 0);
/// Union of the triangles sharing edge e.
Patch edge_patch(const Mesh& mesh, int e);
/// T together with every triangle sharing a vertex with T.
Patch triangle_patch(const Mesh& mesh, int t);
/// Adds one layer: all triangles sharing a vertex with the current patch.
Patch enlarge(const Mesh& mesh, const Patch& patch);

/// max_i | |e_i| - |e_i'| | for the two triangles sharing interior edge e,
/// with edges matched by walking both boundaries counterclockwise from e.
double parallelogram_deviation(const Mesh& mesh, int e);

struct AlphaBetaReport {
  std::vector<int> parallel_edges;    // deviation <= c h^{1+alpha}
  std::vector<int> irregular_edges;   // the remaining interior edges
  double irregular_area = 0.0;        // |union of omega_e over irregular edges|
};

AlphaBetaReport alpha_beta_report(const Mesh& mesh, double alpha, double c);

/// Each triangle is split into four similar children through its edge
/// midpoints. The midpoint of edge e becomes vertex num_vertices() + e.
Mesh refine_regular(const Mesh& mesh);

struct BisectionOptions {
  /// 1: a marked triangle is bisected once on its refinement edge.
  /// 2: a marked triangle and both of its children are bisected, so all
  ///    three edges are split (four children).
  int bisections_per_mark = 1;
  /// Bound on the number of propagation rounds of the conformity closure.
  int max_closure_depth = 10000;
};

/// Newest-vertex bisection with conforming closure.
Mesh refine_bisection(const Mesh& mesh, std::span<const int> marked,
                      const BisectionOptions& options = {});

/// Every triangle bisected twice; one level multiplies the triangle count by 4.
Mesh refine_bisection_uniform(const Mesh& mesh);

/// Marked triangles are refined regularly; neighbours are bisected along
/// refinement edges until the mesh is conforming.
Mesh refine_adaptive(const Mesh& mesh, std::span<const int> marked,
                     int max_closure_depth = 10000);

/// "nv nt" header, nv lines "x y", nt lines "i j k" (0-based).
Mesh read_mesh(std::istream& in);
Mesh read_mesh_file(const std::string& path);
void write_mesh(std::ostream& out, const Mesh& mesh);
void write_mesh_file(const std::string& path, const Mesh& mesh);

}  // namespace rtrecover
