#pragma once

#include <array>
#include <functional>
#include <vector>

#include "rtrecover/mesh.hpp"

namespace rtrecover {

/// Gauss-Legendre rule on [0, 1]. Weights sum to 1.
struct EdgeRule {
  std::vector<double> points;
  std::vector<double> weights;
  int size() const { return static_cast<int>(points.size()); }
};

/// Rule on the reference triangle in barycentric coordinates. Weights sum to 1,
/// so an integral over T is |T| * sum w_q f(x_q).
struct TriangleRule {
  int degree = 0;
  std::vector<std::array<double, 3>> points;
  std::vector<double> weights;
  bool has_negative_weights = false;
  int size() const { return static_cast<int>(points.size()); }
};

/// n-point rule, exact for degree 2n - 1. Supported: 1 <= n <= 32.
const EdgeRule& edge_gauss(int n);

/// Rule exact for total degree `degree` (1..20). Collapsed-coordinate product
/// of Gauss-Jacobi and Gauss-Legendre points; all weights positive.
const TriangleRule& triangle_rule(int degree);

/// Nodes and weights of the Gauss-Jacobi rule for (1-x)^alpha (1+x)^beta on
/// [-1, 1] (Golub-Welsch).
void gauss_jacobi(int n, double alpha, double beta, std::vector<double>& nodes,
                  std::vector<double>& weights);

/// Exact value of the integral of l1^m1 l2^m2 l3^m3 over a triangle of the given area.
double integrate_barycentric_monomial(int m1, int m2, int m3, double area);

double integrate_triangle(const Mesh& mesh, int t, const TriangleRule& rule,
                          const std::function<double(const Point&)>& f);

}  // namespace rtrecover
