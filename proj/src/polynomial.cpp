#include "rtrecover/polynomial.hpp"

namespace rtrecover {

void eval_monomials(int d, const Point& xi, double* out) {
  out[0] = 1.0;
  for (int k = 1; k <= d; ++k) {
    const int prev = monomial_index(k - 1, 0);
    const int cur = monomial_index(k, 0);
    for (int j = 0; j < k; ++j) out[cur + j] = out[prev + j] * xi.x();
    out[cur + k] = out[prev + k - 1] * xi.y();
  }
}

Polynomial::Polynomial(int degree, const Point& center, double scale)
    : degree_(degree), center_(center), scale_(scale),
      coeffs_(Eigen::VectorXd::Zero(num_monomials(degree))) {}

double Polynomial::operator()(const Point& x) const {
  const Point xi = (x - center_) / scale_;
  double v = 0.0;
  double px = 1.0;
  for (int i = 0; i <= degree_; ++i) {
    double py = 1.0;
    for (int j = 0; i + j <= degree_; ++j) {
      v += coeffs_(monomial_index(i, j)) * px * py;
      py *= xi.y();
    }
    px *= xi.x();
  }
  return v;
}

namespace {

double ipow(double b, int e) {
  double r = 1.0;
  for (int i = 0; i < e; ++i) r *= b;
  return r;
}

}  // namespace

Eigen::Vector2d Polynomial::gradient(const Point& x) const {
  const Point xi = (x - center_) / scale_;
  Eigen::Vector2d g = Eigen::Vector2d::Zero();
  for (int i = 0; i <= degree_; ++i) {
    for (int j = 0; i + j <= degree_; ++j) {
      const double c = coeffs_(monomial_index(i, j));
      if (c == 0.0) continue;
      if (i > 0) g(0) += c * i * ipow(xi.x(), i - 1) * ipow(xi.y(), j);
      if (j > 0) g(1) += c * j * ipow(xi.x(), i) * ipow(xi.y(), j - 1);
    }
  }
  return g / scale_;
}

Eigen::Matrix2d Polynomial::hessian(const Point& x) const {
  const Point xi = (x - center_) / scale_;
  Eigen::Matrix2d h = Eigen::Matrix2d::Zero();
  for (int i = 0; i <= degree_; ++i) {
    for (int j = 0; i + j <= degree_; ++j) {
      const double c = coeffs_(monomial_index(i, j));
      if (c == 0.0) continue;
      if (i > 1) h(0, 0) += c * i * (i - 1) * ipow(xi.x(), i - 2) * ipow(xi.y(), j);
      if (j > 1) h(1, 1) += c * j * (j - 1) * ipow(xi.x(), i) * ipow(xi.y(), j - 2);
      if (i > 0 && j > 0) h(0, 1) += c * i * j * ipow(xi.x(), i - 1) * ipow(xi.y(), j - 1);
    }
  }
  h(1, 0) = h(0, 1);
  return h / (scale_ * scale_);
}

}  // namespace rtrecover
