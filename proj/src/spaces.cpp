#include "rtrecover/spaces.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Cholesky>
#include <Eigen/LU>

#include "rtrecover/polynomial.hpp"
#include "rtrecover/quadrature.hpp"

namespace rtrecover {

const std::vector<std::array<int, 3>>& lattice(int k) {
  static const auto table = [] {
    std::vector<std::vector<std::array<int, 3>>> t(9);
    for (int d = 0; d <= 8; ++d)
      for (int a0 = d; a0 >= 0; --a0)
        for (int a1 = d - a0; a1 >= 0; --a1) t[d].push_back({a0, a1, d - a0 - a1});
    return t;
  }();
  if (k < 0 || k > 8) throw std::invalid_argument("lattice degree out of range");
  return table[k];
}

void lagrange_basis(int k, const std::array<double, 3>& lambda, double* out) {
  const auto& idx = lattice(k);
  for (std::size_t n = 0; n < idx.size(); ++n) {
    double v = 1.0;
    for (int i = 0; i < 3; ++i)
      for (int m = 0; m < idx[n][i]; ++m) v *= (k * lambda[i] - m) / (m + 1.0);
    out[n] = v;
  }
}

namespace {

double multinomial(const std::array<int, 3>& a) {
  static constexpr double fact[] = {1, 1, 2, 6, 24, 120, 720, 5040, 40320};
  return fact[a[0] + a[1] + a[2]] / (fact[a[0]] * fact[a[1]] * fact[a[2]]);
}

}  // namespace

void barycentric_monomials(int r, const std::array<double, 3>& lambda, double* out) {
  const auto& idx = lattice(r);
  for (std::size_t n = 0; n < idx.size(); ++n) {
    double v = multinomial(idx[n]);
    for (int i = 0; i < 3; ++i)
      for (int m = 0; m < idx[n][i]; ++m) v *= lambda[i];
    out[n] = v;
  }
}

DofMap::DofMap(const Mesh& mesh, int r)
    : r_(r), num_edges_(mesh.num_edges()),
      total_((r + 1) * mesh.num_edges() + r * (r + 1) * mesh.num_triangles()) {
  if (r < 0 || r > 3) throw std::invalid_argument("RT degree must be in 0..3");
}

void raw_rt_values(int r, const Point& xi,
                   Eigen::Ref<Eigen::Matrix<double, 2, Eigen::Dynamic>> out) {
  const int np = scalar_local_dim(r);
  double mono[scalar_local_dim(3)];
  eval_monomials(r, xi, mono);
  out.setZero();
  for (int i = 0; i < np; ++i) {
    out(0, i) = mono[i];
    out(1, np + i) = mono[i];
  }
  const int h0 = monomial_index(r, 0);
  for (int j = 0; j <= r; ++j) {
    out(0, 2 * np + j) = xi.x() * mono[h0 + j];
    out(1, 2 * np + j) = xi.y() * mono[h0 + j];
  }
}

void raw_rt_divergence(int r, const Point& xi, double scale, Eigen::Ref<Eigen::RowVectorXd> out) {
  const int np = scalar_local_dim(r);
  double mono[scalar_local_dim(3)];
  eval_monomials(r, xi, mono);
  out.setZero();
  for (int d = 1; d <= r; ++d) {
    for (int j = 0; j <= d; ++j) {
      const int i = d - j;
      // d/dx of xi1^i xi2^j, and d/dy
      if (i > 0) out(monomial_index(i, j)) = i * mono[monomial_index(i - 1, j)] / scale;
      if (j > 0) out(np + monomial_index(i, j)) = j * mono[monomial_index(i, j - 1)] / scale;
    }
  }
  const int h0 = monomial_index(r, 0);
  for (int j = 0; j <= r; ++j) out(2 * np + j) = (2.0 + r) * mono[h0 + j] / scale;
}

namespace {

struct EdgeFrame {
  Point start, end, normal;
};

EdgeFrame edge_frame(const TriangleGeometry& g, int k, bool flipped) {
  EdgeFrame f;
  f.start = g.vertices[(k + 1) % 3];
  f.end = g.vertices[(k + 2) % 3];
  f.normal = g.normals[k];
  if (flipped) {
    std::swap(f.start, f.end);
    f.normal = -f.normal;
  }
  return f;
}

int interior_quad_degree(int r) { return std::max(1, 2 * r); }

}  // namespace

LocalRTBasis LocalRTBasis::build(const TriangleGeometry& g, int r, const std::array<bool, 3>& flipped) {
  if (r < 0 || r > 3) throw std::invalid_argument("RT degree must be in 0..3");
  LocalRTBasis b;
  b.r_ = r;
  b.center_ = g.centroid();
  b.scale_ = g.diameter();
  const int n = rt_local_dim(r);
  Eigen::MatrixXd D(n, n);
  Eigen::Matrix<double, 2, Eigen::Dynamic> raw(2, n);

  const EdgeRule& gauss = edge_gauss(r + 1);
  int row = 0;
  for (int k = 0; k < 3; ++k) {
    const EdgeFrame f = edge_frame(g, k, flipped[k]);
    for (int j = 0; j <= r; ++j) {
      const Point x = f.start + gauss.points[j] * (f.end - f.start);
      raw_rt_values(r, (x - b.center_) / b.scale_, raw);
      D.row(row++) = f.normal.transpose() * raw;
    }
  }
  if (r > 0) {
    const int nl = scalar_local_dim(r - 1);
    const TriangleRule& rule = triangle_rule(interior_quad_degree(r));
    D.bottomRows(n - row).setZero();
    double lag[scalar_local_dim(2)];
    for (int q = 0; q < rule.size(); ++q) {
      const auto& lam = rule.points[q];
      const Point x = g.from_barycentric(lam);
      raw_rt_values(r, (x - b.center_) / b.scale_, raw);
      lagrange_basis(r - 1, lam, lag);
      for (int m = 0; m < 2; ++m)
        for (int l = 0; l < nl; ++l) D.row(row + m * nl + l) += rule.weights[q] * lag[l] * raw.row(m);
    }
  }

  // equilibrate columns; the high-degree monomials are small on T
  const Eigen::VectorXd colscale = D.colwise().norm().cwiseInverse().transpose();
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(D * colscale.asDiagonal());
  b.condition_ = 1.0 / lu.rcond();
  if (!(b.condition_ <= 1e12))
    throw MeshError("degenerate triangle: RT dual matrix condition " + std::to_string(b.condition_));
  b.coeffs_ = colscale.asDiagonal() * lu.inverse();
  return b;
}

Eigen::Matrix<double, 2, Eigen::Dynamic> LocalRTBasis::values(const Point& x) const {
  Eigen::Matrix<double, 2, Eigen::Dynamic> raw(2, size());
  raw_rt_values(r_, (x - center_) / scale_, raw);
  return raw * coeffs_;
}

Eigen::RowVectorXd LocalRTBasis::divergence(const Point& x) const {
  Eigen::RowVectorXd raw(size());
  raw_rt_divergence(r_, (x - center_) / scale_, scale_, raw);
  return raw * coeffs_;
}

Eigen::VectorXd local_dof_values(const TriangleGeometry& g, int r, const std::array<bool, 3>& flipped,
                                 const VectorFunction& q, int quad_degree) {
  const int n = rt_local_dim(r);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
  const EdgeRule& gauss = edge_gauss(r + 1);
  const EdgeRule& fine = edge_gauss(std::max(r + 3, (quad_degree + 2) / 2));
  int row = 0;
  for (int k = 0; k < 3; ++k) {
    const EdgeFrame f = edge_frame(g, k, flipped[k]);
    for (int i = 0; i < fine.size(); ++i) {
      const double s = fine.points[i];
      const double qn = q(f.start + s * (f.end - f.start)).dot(f.normal);
      for (int j = 0; j <= r; ++j) {
        double L = 1.0;
        for (int m = 0; m <= r; ++m)
          if (m != j) L *= (s - gauss.points[m]) / (gauss.points[j] - gauss.points[m]);
        out(row + j) += fine.weights[i] * qn * L / gauss.weights[j];
      }
    }
    row += r + 1;
  }
  if (r > 0) {
    const int nl = scalar_local_dim(r - 1);
    const TriangleRule& rule = triangle_rule(quad_degree);
    double lag2[scalar_local_dim(2)];
    for (int qp = 0; qp < rule.size(); ++qp) {
      const auto& lam = rule.points[qp];
      const Vec2 v = q(g.from_barycentric(lam));
      lagrange_basis(r - 1, lam, lag2);
      for (int m = 0; m < 2; ++m)
        for (int l = 0; l < nl; ++l) out(row + m * nl + l) += rule.weights[qp] * lag2[l] * v(m);
    }
  }
  return out;
}

RTSpace::RTSpace(std::shared_ptr<const Mesh> mesh, int r)
    : mesh_(std::move(mesh)), r_(r), dofs_(*mesh_, r) {
  const int nt = mesh_->num_triangles();
  const int n = rt_local_dim(r);
  bases_.reserve(nt);
  local_dofs_.resize(static_cast<std::size_t>(nt) * n);
  for (int t = 0; t < nt; ++t) {
    bases_.push_back(LocalRTBasis::build(geometry(*mesh_, t), r, flipped(t)));
    int* out = local_dofs_.data() + static_cast<std::size_t>(t) * n;
    int i = 0;
    for (int k = 0; k < 3; ++k)
      for (int j = 0; j <= r; ++j) out[i++] = dofs_.edge_dof(mesh_->triangle_edges(t)[k], j);
    for (int l = 0; l < r * (r + 1); ++l) out[i++] = dofs_.interior_dof(t, l);
  }
}

std::array<bool, 3> RTSpace::flipped(int t) const {
  return {mesh_->edge_sign(t, 0) < 0, mesh_->edge_sign(t, 1) < 0, mesh_->edge_sign(t, 2) < 0};
}

RTField::RTField(std::shared_ptr<const RTSpace> space, Eigen::VectorXd coeffs)
    : space_(std::move(space)), coeffs_(std::move(coeffs)) {
  if (coeffs_.size() != space_->size()) throw std::invalid_argument("RTField: coefficient count mismatch");
}

RTField::RTField(std::shared_ptr<const RTSpace> space)
    : space_(std::move(space)), coeffs_(Eigen::VectorXd::Zero(space_->size())) {}

Eigen::VectorXd RTField::local_coefficients(int t) const {
  const auto dofs = space_->local_dofs(t);
  Eigen::VectorXd c(dofs.size());
  for (std::size_t i = 0; i < dofs.size(); ++i) c(i) = coeffs_(dofs[i]);
  return c;
}

namespace {

void check_inside(const Mesh& mesh, int t, const Point& x) {
  const auto lam = geometry(mesh, t).barycentric(x);
  for (double l : lam)
    if (l < -1e-10) throw std::domain_error("point outside triangle " + std::to_string(t));
}

}  // namespace

Vec2 RTField::eval(int t, const Point& x) const {
  check_inside(space_->mesh(), t, x);
  return space_->local_basis(t).values(x) * local_coefficients(t);
}

double RTField::eval_div(int t, const Point& x) const {
  check_inside(space_->mesh(), t, x);
  return space_->local_basis(t).divergence(x).dot(local_coefficients(t));
}

double dof_edge(const Mesh& mesh, const VectorFunction& q, int e, int j, int r) {
  if (j < 0 || j > r) throw std::invalid_argument("dof_edge: Gauss index out of range");
  const Point a = mesh.vertex(mesh.edge(e)[0]);
  const Point b = mesh.vertex(mesh.edge(e)[1]);
  const Point n = mesh.edge_normal(e);
  const EdgeRule& gauss = edge_gauss(r + 1);
  const EdgeRule& fine = edge_gauss(std::max(r + 3, 16));
  double sum = 0.0;
  for (int i = 0; i < fine.size(); ++i) {
    const double s = fine.points[i];
    double L = 1.0;
    for (int m = 0; m <= r; ++m)
      if (m != j) L *= (s - gauss.points[m]) / (gauss.points[j] - gauss.points[m]);
    sum += fine.weights[i] * q(a + s * (b - a)).dot(n) * L;
  }
  return sum / gauss.weights[j];
}

double dof_interior(const Mesh& mesh, const VectorFunction& q, int t, int l, int m, int r,
                    int quad_degree) {
  if (r < 1) throw std::invalid_argument("dof_interior: RT_0 has no interior DOFs");
  if (l < 0 || l >= scalar_local_dim(r - 1) || m < 0 || m > 1)
    throw std::invalid_argument("dof_interior: index out of range");
  if (quad_degree < 0) quad_degree = 2 * r + 6;
  const auto g = geometry(mesh, t);
  const TriangleRule& rule = triangle_rule(quad_degree);
  double lag[scalar_local_dim(2)];
  double sum = 0.0;
  for (int qp = 0; qp < rule.size(); ++qp) {
    lagrange_basis(r - 1, rule.points[qp], lag);
    sum += rule.weights[qp] * lag[l] * q(g.from_barycentric(rule.points[qp]))(m);
  }
  return sum;
}

RTField interpolate_rt(std::shared_ptr<const RTSpace> space, const PiecewiseVectorFunction& q,
                       int quad_degree) {
  const Mesh& mesh = space->mesh();
  const int r = space->degree();
  if (quad_degree < 0) quad_degree = 2 * r + 6;
  RTField field(space);
  std::vector<char> edge_done(mesh.num_edges(), 0);
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto local = local_dof_values(
        geometry(mesh, t), r, space->flipped(t), [&](const Point& x) { return q(t, x); }, quad_degree);
    const auto dofs = space->local_dofs(t);
    for (int k = 0; k < 3; ++k) {
      const int e = mesh.triangle_edges(t)[k];
      if (edge_done[e]) continue;
      edge_done[e] = 1;
      for (int j = 0; j <= r; ++j) field.coefficients()(dofs[k * (r + 1) + j]) = local(k * (r + 1) + j);
    }
    for (int i = 3 * (r + 1); i < rt_local_dim(r); ++i) field.coefficients()(dofs[i]) = local(i);
  }
  return field;
}

RTField interpolate_rt(std::shared_ptr<const RTSpace> space, const VectorFunction& q, int quad_degree) {
  return interpolate_rt(std::move(space), PiecewiseVectorFunction([&](int, const Point& x) { return q(x); }),
                        quad_degree);
}

PiecewiseScalar::PiecewiseScalar(std::shared_ptr<const Mesh> mesh, int r)
    : mesh_(std::move(mesh)), r_(r),
      coeffs_(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(mesh_->num_triangles()) * scalar_local_dim(r))) {
  if (r < 0 || r > 3) throw std::invalid_argument("scalar degree must be in 0..3");
}

double PiecewiseScalar::eval(int t, const Point& x) const {
  const auto lam = geometry(*mesh_, t).barycentric(x);
  double b[scalar_local_dim(3)];
  barycentric_monomials(r_, lam, b);
  double v = 0.0;
  const auto c = local_coefficients(t);
  for (int i = 0; i < local_size(); ++i) v += c(i) * b[i];
  return v;
}

namespace {

// Exact mass matrix of the Bernstein basis of degree r, divided by |T|.
Eigen::MatrixXd scaled_monomial_mass(int r) {
  const auto& idx = lattice(r);
  const int n = static_cast<int>(idx.size());
  Eigen::MatrixXd M(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      M(i, j) = multinomial(idx[i]) * multinomial(idx[j]) *
                integrate_barycentric_monomial(idx[i][0] + idx[j][0], idx[i][1] + idx[j][1],
                                               idx[i][2] + idx[j][2], 1.0);
  return M;
}

}  // namespace

PiecewiseScalar project_l2(std::shared_ptr<const Mesh> mesh, int r,
                           const std::function<double(int, const Point&)>& v, int quad_degree) {
  if (quad_degree < 0) quad_degree = 2 * r + 6;
  PiecewiseScalar out(mesh, r);
  const auto mass = scaled_monomial_mass(r).ldlt();
  const TriangleRule& rule = triangle_rule(quad_degree);
  const int n = scalar_local_dim(r);
  double b[scalar_local_dim(3)];
  for (int t = 0; t < mesh->num_triangles(); ++t) {
    const auto g = geometry(*mesh, t);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
    for (int q = 0; q < rule.size(); ++q) {
      barycentric_monomials(r, rule.points[q], b);
      const double val = v(t, g.from_barycentric(rule.points[q]));
      for (int i = 0; i < n; ++i) rhs(i) += rule.weights[q] * val * b[i];
    }
    out.local_coefficients(t) = mass.solve(rhs);
  }
  return out;
}

PiecewiseScalar project_l2(std::shared_ptr<const Mesh> mesh, int r, const ScalarFunction& v,
                           int quad_degree) {
  return project_l2(std::move(mesh), r,
                    std::function<double(int, const Point&)>([&](int, const Point& x) { return v(x); }),
                    quad_degree);
}

LagrangeVecField::LagrangeVecField(std::shared_ptr<const Mesh> mesh, int k)
    : mesh_(std::move(mesh)), k_(k) {
  if (k < 1) throw std::invalid_argument("Lagrange degree must be positive");
  const Mesh& m = *mesh_;
  const int nv = m.num_vertices();
  const int ne = m.num_edges();
  const int ni = (k - 1) * (k - 2) / 2;
  const int total = nv + (k - 1) * ne + ni * m.num_triangles();
  values_.assign(total, Vec2::Zero());
  const auto& idx = lattice(k);
  local_nodes_.resize(static_cast<std::size_t>(m.num_triangles()) * idx.size());
  for (int t = 0; t < m.num_triangles(); ++t) {
    const auto& tri = m.triangle(t);
    int interior = 0;
    for (std::size_t n = 0; n < idx.size(); ++n) {
      const auto& a = idx[n];
      int node = -1;
      int zeros = 0, zero_at = -1;
      for (int i = 0; i < 3; ++i)
        if (a[i] == 0) ++zeros, zero_at = i;
      if (zeros == 2) {
        for (int i = 0; i < 3; ++i)
          if (a[i] == k) node = tri[i];
      } else if (zeros == 1) {
        const int e = m.triangle_edges(t)[zero_at];
        const int hi = m.edge(e)[1];
        const int i1 = (zero_at + 1) % 3, i2 = (zero_at + 2) % 3;
        const int j = tri[i1] == hi ? a[i1] : a[i2];
        node = nv + (k - 1) * e + (j - 1);
      } else {
        node = nv + (k - 1) * ne + ni * t + interior++;
      }
      local_nodes_[static_cast<std::size_t>(t) * idx.size() + n] = node;
    }
  }
}

Point LagrangeVecField::node_position(int n) const {
  const Mesh& m = *mesh_;
  const int nv = m.num_vertices();
  const int ne = m.num_edges();
  if (n < nv) return m.vertex(n);
  if (n < nv + (k_ - 1) * ne) {
    const int e = (n - nv) / (k_ - 1);
    const int j = (n - nv) % (k_ - 1) + 1;
    const Point a = m.vertex(m.edge(e)[0]);
    const Point b = m.vertex(m.edge(e)[1]);
    return a + (static_cast<double>(j) / k_) * (b - a);
  }
  const int ni = (k_ - 1) * (k_ - 2) / 2;
  const int t = (n - nv - (k_ - 1) * ne) / ni;
  const auto g = geometry(m, t);
  const auto nodes = local_nodes(t);
  const auto& idx = lattice(k_);
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i] == n)
      return g.from_barycentric({idx[i][0] / double(k_), idx[i][1] / double(k_), idx[i][2] / double(k_)});
  }
  throw std::logic_error("node not found");
}

Vec2 LagrangeVecField::eval(int t, const Point& x) const {
  const auto lam = geometry(*mesh_, t).barycentric(x);
  double phi[scalar_local_dim(4)];
  lagrange_basis(k_, lam, phi);
  Vec2 v = Vec2::Zero();
  const auto nodes = local_nodes(t);
  for (std::size_t i = 0; i < nodes.size(); ++i) v += phi[i] * values_[nodes[i]];
  return v;
}

}  // namespace rtrecover
