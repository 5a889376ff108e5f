#pragma once

#include <Eigen/Core>

#include "rtrecover/mesh.hpp"

namespace rtrecover {

/// Number of monomials of total degree <= d in two variables.
constexpr int num_monomials(int d) { return (d + 1) * (d + 2) / 2; }

/// Position of x^i y^j in the graded ordering 1, x, y, x^2, xy, y^2, ...
constexpr int monomial_index(int i, int j) { return (i + j) * (i + j + 1) / 2 + j; }

/// Values of all monomials of degree <= d at xi, in graded order.
void eval_monomials(int d, const Point& xi, double* out);

/// Bivariate polynomial of degree <= d written in the scaled variable
/// (x - center) / scale.
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(int degree, const Point& center = Point::Zero(), double scale = 1.0);

  int degree() const { return degree_; }
  const Point& center() const { return center_; }
  double scale() const { return scale_; }
  Eigen::VectorXd& coefficients() { return coeffs_; }
  const Eigen::VectorXd& coefficients() const { return coeffs_; }
  double& coeff(int i, int j) { return coeffs_(monomial_index(i, j)); }
  double coeff(int i, int j) const { return coeffs_(monomial_index(i, j)); }

  double operator()(const Point& x) const;
  Eigen::Vector2d gradient(const Point& x) const;
  Eigen::Matrix2d hessian(const Point& x) const;

 private:
  int degree_ = 0;
  Point center_ = Point::Zero();
  double scale_ = 1.0;
  Eigen::VectorXd coeffs_;
};

struct VectorPolynomial {
  Polynomial x, y;

  VectorPolynomial() = default;
  explicit VectorPolynomial(int degree, const Point& center = Point::Zero(), double scale = 1.0)
      : x(degree, center, scale), y(degree, center, scale) {}

  Eigen::Vector2d operator()(const Point& p) const { return {x(p), y(p)}; }
  double divergence(const Point& p) const { return x.gradient(p)(0) + y.gradient(p)(1); }
};

}  // namespace rtrecover
