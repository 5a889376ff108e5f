#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "rtrecover/mesh.hpp"
#include "rtrecover/polynomial.hpp"

namespace rtrecover {

/// Coefficient tables of one triangle, indexed [k][i][j][l] with 0-based
/// i, j, l (0 = tangential, 1 = normal) and k the edge opposite vertex k.
struct EdgeCoefficients {
  using Table = std::array<std::array<std::array<double, 2>, 2>, 2>;
  std::array<Table, 3> mu{};     // length^4
  std::array<Table, 3> alpha{};  // length^3
};

EdgeCoefficients edge_coefficients(const TriangleGeometry& g);

/// D^{jl}_{i,k}(q) = d_i . (d_j^T Hess(q) d_l), d_0 = t_k, d_1 = n_k. Exact for
/// quadratic q (evaluated at the centroid otherwise).
double directional_D(const VectorPolynomial& q, const TriangleGeometry& g, int k, int i, int j, int l);

/// B_k(q) = sum_{i,j,l} mu^i_{jl,k} D^{jl}_{i,k}(q).
double apply_Bk(const VectorPolynomial& p2, const TriangleGeometry& g, int k);

/// |p|_2 measure used to scale tolerances: sqrt of the summed squared Hessian entries.
double second_seminorm(const VectorPolynomial& p);
double second_seminorm(const Polynomial& w);

struct IdentityCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  double residual = 0.0;   // absolute
  double scale = 1.0;      // residual / scale is compared with the tolerance
  double relative() const { return residual / scale; }
};

/// int_T (p2 - Pi^1 p2) . curl w2  versus  sum_k l_k B_k(p2) d^2_{t_k} w2.
/// scale = |p2|_2 |w2|_2 diam^5.
IdentityCheck check_rt1err2(const TriangleGeometry& g, const VectorPolynomial& p2, const Polynomial& w2);

struct RT1Err1Check {
  IdentityCheck representation;  // max_x |(p2 - Pi p2)(x) - curl w(x)|, scale |p2|_2 diam^2
  double beta_spread = 0.0;      // spread of the bubble coefficient over beta, relative to |p2|_2 diam^3
  double max_divergence = 0.0;   // max |div(p2 - Pi p2)|, relative to |p2|_2 diam
};

RT1Err1Check check_rt1err1(const TriangleGeometry& g, const VectorPolynomial& p2);

struct HierarchyCheck {
  IdentityCheck interpolation;  // w2 - I w2 = -1/2 sum l_k^2 phi_k d^2_{t_k} w2, scale |w2|_2 diam^2
  IdentityCheck laplacian;      // Laplacian edge formula, scale |w2|_2
};

HierarchyCheck check_hierarchy(const TriangleGeometry& g, const Polynomial& w2);

/// Principal lattice of degree 5 plus the centroid.
std::vector<Point> sample_points(const TriangleGeometry& g);

/// Longest edge over shortest altitude.
double aspect_ratio(const TriangleGeometry& g);

struct VerifyOptions {
  int samples = 500;
  std::uint64_t seed = 1;
  double aspect_max = 20.0;
};

struct VerifyRow {
  std::string name;
  double worst = 0.0;      // worst relative residual
  double tolerance = 0.0;
  std::array<Point, 3> worst_triangle{};
  bool pass() const { return worst <= tolerance; }
};

struct VerifyReport {
  std::vector<VerifyRow> rows;
  int samples = 0;
  bool pass() const;
};

/// Random triangles (aspect ratio up to aspect_max, sizes over several decades)
/// with random quadratic data; every identity is checked on each sample.
VerifyReport run_verify_suite(const VerifyOptions& options);

void print_verify_report(std::ostream& out, const VerifyReport& report);

}  // namespace rtrecover
