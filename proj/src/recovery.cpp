#include "rtrecover/recovery.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include <Eigen/QR>
#include <Eigen/SVD>

#include "rtrecover/quadrature.hpp"

namespace rtrecover {

double PatchLS::rank_ratio() const {
  if (singular_values.size() == 0 || singular_values(0) == 0.0) return 0.0;
  return singular_values(singular_values.size() - 1) / singular_values(0);
}

Eigen::MatrixXd patch_matrix(const Mesh& mesh, const Patch& patch, int r, const Point& center,
                             double scale) {
  const int M = num_monomials(r + 1);
  const int nl = r > 0 ? scalar_local_dim(r - 1) : 0;
  const int rows = (r + 1) * static_cast<int>(patch.edges.size()) +
                   2 * nl * static_cast<int>(patch.triangles.size());
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(rows, 2 * M);
  double mono[num_monomials(4)];
  const EdgeRule& gauss = edge_gauss(r + 1);
  int row = 0;
  for (int e : patch.edges) {
    const Point a = mesh.vertex(mesh.edge(e)[0]);
    const Point b = mesh.vertex(mesh.edge(e)[1]);
    const Point n = mesh.edge_normal(e);
    for (int j = 0; j <= r; ++j) {
      eval_monomials(r + 1, (a + gauss.points[j] * (b - a) - center) / scale, mono);
      for (int i = 0; i < M; ++i) {
        A(row, i) = n.x() * mono[i];
        A(row, M + i) = n.y() * mono[i];
      }
      ++row;
    }
  }
  if (r > 0) {
    const TriangleRule& rule = triangle_rule(2 * r);
    double lag[scalar_local_dim(2)];
    for (int t : patch.triangles) {
      const auto g = geometry(mesh, t);
      for (int q = 0; q < rule.size(); ++q) {
        eval_monomials(r + 1, (g.from_barycentric(rule.points[q]) - center) / scale, mono);
        lagrange_basis(r - 1, rule.points[q], lag);
        for (int l = 0; l < nl; ++l) {
          const double w = rule.weights[q] * lag[l];
          for (int i = 0; i < M; ++i) {
            A(row + l, i) += w * mono[i];
            A(row + nl + l, M + i) += w * mono[i];
          }
        }
      }
      row += 2 * nl;
    }
  }
  return A;
}

namespace {

Eigen::VectorXd singular_values(const Eigen::MatrixXd& A) {
  if (A.rows() < A.cols()) {
    Eigen::VectorXd s = Eigen::VectorXd::Zero(A.cols());
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(A);
    s.head(svd.singularValues().size()) = svd.singularValues();
    return s;
  }
  return Eigen::JacobiSVD<Eigen::MatrixXd>(A).singularValues();
}

double ratio(const Eigen::VectorXd& s) {
  return s(0) > 0.0 ? s(s.size() - 1) / s(0) : 0.0;
}

}  // namespace

bool check_uniqueness(const Mesh& mesh, int z, int r) {
  const auto star = mesh.vertex_triangles(z);
  const int nt = static_cast<int>(star.size());
  if (r == 1) return nt >= 4;
  if (r == 0) {
    if (nt < 5) return false;
    auto angle_at = [&](int t) {
      const auto& tri = mesh.triangle(t);
      const auto g = geometry(mesh, t);
      for (int k = 0; k < 3; ++k)
        if (tri[k] == z) return g.angles[k];
      return 0.0;
    };
    for (int t : star) {
      for (int e : mesh.triangle_edges(t)) {
        // the edges through z separate consecutive triangles of the star
        if (mesh.edge(e)[0] != z && mesh.edge(e)[1] != z) continue;
        const auto& inc = mesh.edge_triangles(e);
        if (inc[1] < 0 || inc[0] != t) continue;
        if (angle_at(inc[0]) + angle_at(inc[1]) > std::numbers::pi + 1e-12) return false;
      }
    }
    return true;
  }
  const Patch p = vertex_patch(mesh, z);
  return ratio(singular_values(patch_matrix(mesh, p, r, mesh.vertex(z), p.scale))) >=
         RecoveryOptions{}.rank_threshold;
}

PatchLS assemble_patch_ls(const RTField& ph, int z, const Patch& patch) {
  const Mesh& mesh = ph.space().mesh();
  const int r = ph.degree();
  const DofMap& dofs = ph.space().dofs();
  PatchLS ls;
  ls.vertex = z;
  ls.r = r;
  ls.patch = patch;
  ls.center = mesh.vertex(z);
  ls.scale = patch.scale;
  ls.A = patch_matrix(mesh, patch, r, ls.center, ls.scale);
  ls.d.resize(ls.A.rows());
  int row = 0;
  for (int e : patch.edges)
    for (int j = 0; j <= r; ++j) ls.d(row++) = ph.coefficients()(dofs.edge_dof(e, j));
  for (int t : patch.triangles)
    for (int i = 0; i < r * (r + 1); ++i) ls.d(row++) = ph.coefficients()(dofs.interior_dof(t, i));
  ls.singular_values = singular_values(ls.A);
  return ls;
}

PatchLS build_patch_ls(const RTField& ph, int z, const RecoveryOptions& options) {
  const Mesh& mesh = ph.space().mesh();
  Patch patch = vertex_patch(mesh, z);
  const int min_tris = mesh.is_boundary_vertex(z) ? options.min_boundary_triangles : 0;
  while (true) {
    if (static_cast<int>(patch.triangles.size()) >= min_tris) {
      PatchLS ls = assemble_patch_ls(ph, z, patch);
      if (ls.rank_ratio() >= options.rank_threshold) return ls;
    }
    Patch bigger = enlarge(mesh, patch);
    if (bigger.triangles.size() == patch.triangles.size()) {
      if (static_cast<int>(patch.triangles.size()) < min_tris) {
        PatchLS ls = assemble_patch_ls(ph, z, patch);
        if (ls.rank_ratio() >= options.rank_threshold) return ls;
      }
      throw RecoveryError("vertex " + std::to_string(z) +
                          ": patch covers the whole mesh without reaching full rank");
    }
    patch = std::move(bigger);
  }
}

VectorPolynomial solve_patch_ls(const PatchLS& ls) {
  if (ls.A.rows() < ls.A.cols() || !(ls.rank_ratio() > 0.0))
    throw RecoveryError("vertex " + std::to_string(ls.vertex) + ": rank-deficient patch");
  const Eigen::VectorXd c = ls.A.householderQr().solve(ls.d);
  const int M = num_monomials(ls.r + 1);
  VectorPolynomial q(ls.r + 1, ls.center, ls.scale);
  q.x.coefficients() = c.head(M);
  q.y.coefficients() = c.tail(M);
  return q;
}

LagrangeVecField recover(const RTField& ph, const RecoveryOptions& options) {
  const auto& mesh_ptr = ph.space().mesh_ptr();
  const Mesh& mesh = *mesh_ptr;
  const int k = ph.degree() + 1;
  std::vector<VectorPolynomial> local(mesh.num_vertices());
  for (int z = 0; z < mesh.num_vertices(); ++z) {
    try {
      local[z] = solve_patch_ls(build_patch_ls(ph, z, options));
    } catch (const RecoveryError&) {
      throw;
    } catch (const std::exception& ex) {
      throw RecoveryError("vertex " + std::to_string(z) + ": " + ex.what());
    }
  }

  LagrangeVecField out(mesh_ptr, k);
  const auto& idx = lattice(k);
  std::vector<char> done(out.num_nodes(), 0);
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto& tri = mesh.triangle(t);
    const auto g = geometry(mesh, t);
    const auto nodes = out.local_nodes(t);
    for (std::size_t n = 0; n < nodes.size(); ++n) {
      if (done[nodes[n]]) continue;
      done[nodes[n]] = 1;
      const std::array<double, 3> lam{idx[n][0] / double(k), idx[n][1] / double(k), idx[n][2] / double(k)};
      const Point x = g.from_barycentric(lam);
      Vec2 v = Vec2::Zero();
      for (int i = 0; i < 3; ++i)
        if (idx[n][i] > 0) v += lam[i] * local[tri[i]](x);
      out.value(nodes[n]) = v;
    }
  }
  return out;
}

}  // namespace rtrecover
