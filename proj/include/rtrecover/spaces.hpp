#pragma once

#include <array>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "rtrecover/mesh.hpp"

namespace rtrecover {

using Vec2 = Eigen::Vector2d;
using VectorFunction = std::function<Vec2(const Point&)>;
using ScalarFunction = std::function<double(const Point&)>;
/// Vector field that may be discontinuous across triangles.
using PiecewiseVectorFunction = std::function<Vec2(int t, const Point&)>;

/// Dimension of RT_r(T).
constexpr int rt_local_dim(int r) { return (r + 1) * (r + 3); }
/// Dimension of P_r(T).
constexpr int scalar_local_dim(int r) { return (r + 1) * (r + 2) / 2; }

/// Multi-indices (a0, a1, a2) with a0 + a1 + a2 = k, in a fixed order.
const std::vector<std::array<int, 3>>& lattice(int k);
/// Degree-k Lagrange basis on the principal lattice, evaluated at barycentric
/// coordinates, in lattice(k) order.
void lagrange_basis(int k, const std::array<double, 3>& lambda, double* out);

/// Global numbering of RT_r degrees of freedom: r+1 per edge (ordered along
/// the global edge direction), then r(r+1) interior moments per triangle.
class DofMap {
 public:
  DofMap(const Mesh& mesh, int r);

  int degree() const { return r_; }
  int size() const { return total_; }
  int num_edge_dofs() const { return (r_ + 1) * num_edges_; }
  int edge_dof(int e, int j) const { return (r_ + 1) * e + j; }
  /// i = m * (r(r+1)/2) + l for component m and moment function l.
  int interior_dof(int t, int i) const { return num_edge_dofs() + r_ * (r_ + 1) * t + i; }

 private:
  int r_;
  int num_edges_;
  int total_;
};

/// Nodal-dual basis of RT_r on one triangle. Local DOF order: edge 0 (r+1
/// point values), edge 1, edge 2, then the interior moments. Edge functionals
/// use the global edge direction, reversed relative to the counterclockwise
/// tangent when `flipped[k]` is set.
class LocalRTBasis {
 public:
  static LocalRTBasis build(const TriangleGeometry& g, int r,
                            const std::array<bool, 3>& flipped = {false, false, false});

  int degree() const { return r_; }
  int size() const { return rt_local_dim(r_); }
  /// 2 x N matrix of basis values at x.
  Eigen::Matrix<double, 2, Eigen::Dynamic> values(const Point& x) const;
  Eigen::RowVectorXd divergence(const Point& x) const;
  /// Condition number estimate of the DOF-by-monomial matrix.
  double condition() const { return condition_; }

 private:
  int r_ = 0;
  Point center_;
  double scale_ = 1.0;
  Eigen::MatrixXd coeffs_;  // monomial-to-dual change of basis
  double condition_ = 1.0;
};

/// Raw shape functions of RT_r: P_r^2 followed by xi * (homogeneous degree r),
/// in the scaled variable xi = (x - center) / scale.
void raw_rt_values(int r, const Point& xi, Eigen::Ref<Eigen::Matrix<double, 2, Eigen::Dynamic>> out);
void raw_rt_divergence(int r, const Point& xi, double scale, Eigen::Ref<Eigen::RowVectorXd> out);

/// Applies the local DOF functionals to q. Edge functionals use the moment
/// form with a Gauss rule of at least r+3 points that also integrates degree
/// `quad_degree` exactly; interior moments use a rule of degree `quad_degree`.
Eigen::VectorXd local_dof_values(const TriangleGeometry& g, int r, const std::array<bool, 3>& flipped,
                                 const VectorFunction& q, int quad_degree);

class RTSpace {
 public:
  RTSpace(std::shared_ptr<const Mesh> mesh, int r);

  const Mesh& mesh() const { return *mesh_; }
  const std::shared_ptr<const Mesh>& mesh_ptr() const { return mesh_; }
  int degree() const { return r_; }
  const DofMap& dofs() const { return dofs_; }
  int size() const { return dofs_.size(); }
  const LocalRTBasis& local_basis(int t) const { return bases_[t]; }
  std::span<const int> local_dofs(int t) const {
    return {local_dofs_.data() + static_cast<std::size_t>(t) * rt_local_dim(r_),
            static_cast<std::size_t>(rt_local_dim(r_))};
  }
  std::array<bool, 3> flipped(int t) const;

 private:
  std::shared_ptr<const Mesh> mesh_;
  int r_;
  DofMap dofs_;
  std::vector<LocalRTBasis> bases_;
  std::vector<int> local_dofs_;
};

class RTField {
 public:
  RTField(std::shared_ptr<const RTSpace> space, Eigen::VectorXd coeffs);
  explicit RTField(std::shared_ptr<const RTSpace> space);

  const RTSpace& space() const { return *space_; }
  const std::shared_ptr<const RTSpace>& space_ptr() const { return space_; }
  int degree() const { return space_->degree(); }
  Eigen::VectorXd& coefficients() { return coeffs_; }
  const Eigen::VectorXd& coefficients() const { return coeffs_; }
  Eigen::VectorXd local_coefficients(int t) const;

  /// Throws std::domain_error if x is outside T (barycentric tolerance 1e-10).
  Vec2 eval(int t, const Point& x) const;
  double eval_div(int t, const Point& x) const;

 private:
  std::shared_ptr<const RTSpace> space_;
  Eigen::VectorXd coeffs_;
};

/// N_e^j(q) = (1/|e|) int_e q.n_e v_j, evaluated with a 16-point rule.
double dof_edge(const Mesh& mesh, const VectorFunction& q, int e, int j, int r);
/// N_T^{lm}(q) = (1/|T|) int_T q_m lambda_l; requires r >= 1.
double dof_interior(const Mesh& mesh, const VectorFunction& q, int t, int l, int m, int r,
                    int quad_degree = -1);

/// Canonical interpolant. Interior moments use a rule of degree `quad_degree`
/// (default 2r + 6).
RTField interpolate_rt(std::shared_ptr<const RTSpace> space, const VectorFunction& q,
                       int quad_degree = -1);
/// Same for a piecewise field; edge DOFs are taken from the first triangle of each edge.
RTField interpolate_rt(std::shared_ptr<const RTSpace> space, const PiecewiseVectorFunction& q,
                       int quad_degree = -1);

/// Discontinuous P_r field in the Bernstein basis (r! / alpha!) lambda^alpha, |alpha| = r.
class PiecewiseScalar {
 public:
  PiecewiseScalar(std::shared_ptr<const Mesh> mesh, int r);

  const Mesh& mesh() const { return *mesh_; }
  int degree() const { return r_; }
  int local_size() const { return scalar_local_dim(r_); }
  Eigen::VectorXd& coefficients() { return coeffs_; }
  const Eigen::VectorXd& coefficients() const { return coeffs_; }
  auto local_coefficients(int t) { return coeffs_.segment(t * local_size(), local_size()); }
  auto local_coefficients(int t) const { return coeffs_.segment(t * local_size(), local_size()); }
  double eval(int t, const Point& x) const;

 private:
  std::shared_ptr<const Mesh> mesh_;
  int r_;
  Eigen::VectorXd coeffs_;
};

/// Bernstein polynomials (r! / alpha!) lambda^alpha for alpha in lattice(r).
void barycentric_monomials(int r, const std::array<double, 3>& lambda, double* out);

PiecewiseScalar project_l2(std::shared_ptr<const Mesh> mesh, int r, const ScalarFunction& v,
                           int quad_degree = -1);
/// Elementwise projection of a piecewise function.
PiecewiseScalar project_l2(std::shared_ptr<const Mesh> mesh, int r,
                           const std::function<double(int, const Point&)>& v, int quad_degree = -1);

/// Continuous vector field of degree k. Node numbering: vertices, then k-1
/// nodes per edge (from the lower vertex to the higher), then the interior
/// nodes of each triangle.
class LagrangeVecField {
 public:
  LagrangeVecField(std::shared_ptr<const Mesh> mesh, int k);

  const Mesh& mesh() const { return *mesh_; }
  int degree() const { return k_; }
  int num_nodes() const { return static_cast<int>(values_.size()); }
  Point node_position(int n) const;
  Vec2& value(int n) { return values_[n]; }
  const Vec2& value(int n) const { return values_[n]; }
  /// Global nodes of triangle t in lattice(k) order.
  std::span<const int> local_nodes(int t) const {
    return {local_nodes_.data() + static_cast<std::size_t>(t) * scalar_local_dim(k_),
            static_cast<std::size_t>(scalar_local_dim(k_))};
  }
  Vec2 eval(int t, const Point& x) const;

 private:
  std::shared_ptr<const Mesh> mesh_;
  int k_;
  std::vector<Vec2> values_;
  std::vector<int> local_nodes_;
};

}  // namespace rtrecover
