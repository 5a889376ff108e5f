#include "rtrecover/quadrature.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace rtrecover {

void gauss_jacobi(int n, double alpha, double beta, std::vector<double>& nodes,
                  std::vector<double>& weights) {
  if (n < 1) throw std::invalid_argument("gauss_jacobi: n must be positive");
  const double ab = alpha + beta;
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int k = 0; k < n; ++k) {
    const double s = 2.0 * k + ab;
    J(k, k) = k == 0 ? (beta - alpha) / (ab + 2.0) : (beta * beta - alpha * alpha) / (s * (s + 2.0));
    if (k + 1 < n) {
      const double m = k + 1.0;
      const double s1 = 2.0 * m + ab;
      const double b = 4.0 * m * (m + alpha) * (m + beta) * (m + ab) /
                       (s1 * s1 * (s1 + 1.0) * (s1 - 1.0));
      J(k, k + 1) = J(k + 1, k) = std::sqrt(b);
    }
  }
  const double mu0 = std::pow(2.0, ab + 1.0) * std::tgamma(alpha + 1.0) *
                     std::tgamma(beta + 1.0) / std::tgamma(ab + 2.0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(J);
  nodes.resize(n);
  weights.resize(n);
  for (int i = 0; i < n; ++i) {
    nodes[i] = eig.eigenvalues()(i);
    const double v = eig.eigenvectors()(0, i);
    weights[i] = mu0 * v * v;
  }
}

namespace {

EdgeRule make_edge_rule(int n) {
  std::vector<double> x, w;
  gauss_jacobi(n, 0.0, 0.0, x, w);
  EdgeRule rule;
  rule.points.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    // symmetrize about the midpoint
    const double xs = 0.5 * (x[i] - x[n - 1 - i]);
    const double ws = 0.5 * (w[i] + w[n - 1 - i]);
    rule.points[i] = 0.5 * (1.0 + xs);
    rule.weights[i] = 0.5 * ws;
  }
  if (n % 2 == 1) rule.points[n / 2] = 0.5;
  return rule;
}

TriangleRule make_triangle_rule(int degree) {
  const int n = (degree + 2) / 2;
  std::vector<double> xj, wj, xl, wl;
  gauss_jacobi(n, 0.0, 1.0, xj, wj);
  gauss_jacobi(n, 0.0, 0.0, xl, wl);
  TriangleRule rule;
  rule.degree = degree;
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    const double s = 0.5 * (1.0 + xj[i]);
    for (int j = 0; j < n; ++j) {
      const double t = 0.5 * (1.0 + xl[j]);
      rule.points.push_back({1.0 - s, s * (1.0 - t), s * t});
      rule.weights.push_back(wj[i] * wl[j]);
      total += wj[i] * wl[j];
    }
  }
  for (double& w : rule.weights) w /= total;
  return rule;
}

}  // namespace

const EdgeRule& edge_gauss(int n) {
  if (n < 1 || n > 32) throw std::invalid_argument("edge_gauss: unsupported point count");
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<EdgeRule>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<EdgeRule>(make_edge_rule(n));
  return *slot;
}

const TriangleRule& triangle_rule(int degree) {
  if (degree < 1 || degree > 20)
    throw std::invalid_argument("triangle_rule: unsupported degree " + std::to_string(degree));
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<TriangleRule>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[degree];
  if (!slot) slot = std::make_unique<TriangleRule>(make_triangle_rule(degree));
  return *slot;
}

double integrate_barycentric_monomial(int m1, int m2, int m3, double area) {
  return 2.0 * area * std::tgamma(m1 + 1.0) * std::tgamma(m2 + 1.0) * std::tgamma(m3 + 1.0) /
         std::tgamma(m1 + m2 + m3 + 3.0);
}

double integrate_triangle(const Mesh& mesh, int t, const TriangleRule& rule,
                          const std::function<double(const Point&)>& f) {
  const auto& tri = mesh.triangle(t);
  const Point& a = mesh.vertex(tri[0]);
  const Point& b = mesh.vertex(tri[1]);
  const Point& c = mesh.vertex(tri[2]);
  double sum = 0.0;
  for (int q = 0; q < rule.size(); ++q) {
    const auto& l = rule.points[q];
    sum += rule.weights[q] * f(l[0] * a + l[1] * b + l[2] * c);
  }
  return mesh.area(t) * sum;
}

}  // namespace rtrecover
