#include <chrono>
#include <cmath>
#include <random>

#include "doctest.h"
#include "rtrecover/verify.hpp"
#include "support.hpp"

using namespace rtrecover;

namespace {

TriangleGeometry tri(Point a, Point b, Point c) { return TriangleGeometry::from_vertices(a, b, c); }

TriangleGeometry random_geometry(std::mt19937_64& rng, double min_angle) {
  const auto z = testing::random_triangle(rng, min_angle);
  return tri(z[0], z[1], z[2]);
}

const TriangleGeometry kEquilateral = tri({0, 0}, {1, 0}, {0.5, std::sqrt(3.0) / 2});
const TriangleGeometry kScalene = tri({0.1, -0.2}, {1.3, 0.15}, {0.35, 0.9});

VectorPolynomial vpoly(std::mt19937_64& rng, const Point& c) {
  std::normal_distribution<double> N;
  VectorPolynomial p(2, c, 1.0);
  for (auto& v : p.x.coefficients()) v = N(rng);
  for (auto& v : p.y.coefficients()) v = N(rng);
  return p;
}

Polynomial spoly(std::mt19937_64& rng, const Point& c) {
  std::normal_distribution<double> N;
  Polynomial w(2, c, 1.0);
  for (auto& v : w.coefficients()) v = N(rng);
  return w;
}

}  // namespace

TEST_CASE("coefficients of the equilateral triangle") {
  const auto c = edge_coefficients(kEquilateral);
  const double s3 = std::sqrt(3.0);
  for (int k = 0; k < 3; ++k) {
    CHECK(c.mu[k][0][0][0] == doctest::Approx(-5.0 / 5760));
    CHECK(std::abs(c.mu[k][0][0][1]) < 1e-16);
    CHECK(c.mu[k][0][1][1] == doctest::Approx(-1.0 / 1920));
    CHECK(std::abs(c.mu[k][1][0][0]) < 1e-16);
    CHECK(c.alpha[k][0][0][0] == doctest::Approx(s3 / 16));
    CHECK(std::abs(c.alpha[k][0][0][1]) < 1e-16);
    CHECK(c.alpha[k][0][1][1] == doctest::Approx(-s3 / 16));
    CHECK(std::abs(c.alpha[k][1][0][0]) < 1e-16);
  }
}

TEST_CASE("coefficient invariants on random triangles") {
  std::mt19937_64 rng(3);
  for (int s = 0; s < 200; ++s) {
    const auto g = random_geometry(rng, 0.1);
    const auto c = edge_coefficients(g);
    const double s2 = 1.7;
    const auto gs = tri(s2 * g.vertices[0], s2 * g.vertices[1], s2 * g.vertices[2]);
    const auto cs = edge_coefficients(gs);
    for (int k = 0; k < 3; ++k) {
      const auto& m = c.mu[k];
      const auto& a = c.alpha[k];
      CHECK(m[0][1][1] < 0);
      // l1^2 l2^2 l3^2 / d^2 = 4 |T|^2
      CHECK(m[0][1][1] == doctest::Approx(-g.area * g.area / 360));
      for (int i = 0; i < 2; ++i) {
        CHECK(m[i][0][1] == m[i][1][0]);
        CHECK(a[i][0][1] == a[i][1][0]);
      }
      CHECK(m[1][0][1] == -m[0][0][0]);
      CHECK(m[1][1][1] == -m[0][0][1]);
      CHECK(a[1][0][1] == -a[0][0][0]);
      CHECK(a[1][1][1] == -a[0][0][1]);
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
          for (int l = 0; l < 2; ++l) {
            CHECK(cs.mu[k][i][j][l] == doctest::Approx(std::pow(s2, 4) * m[i][j][l]).epsilon(1e-12).scale(g.area * g.area));
            CHECK(cs.alpha[k][i][j][l] ==
                  doctest::Approx(std::pow(s2, 3) * a[i][j][l]).epsilon(1e-12).scale(std::pow(g.diameter(), 3)));
          }
    }
  }
  // isoceles at edge 0: l_2 = l_1
  const auto iso = tri({0, 1.3}, {-0.4, 0}, {0.4, 0});
  const auto c = edge_coefficients(iso);
  CHECK(std::abs(c.mu[0][0][0][1]) < 1e-15);
  CHECK(std::abs(c.mu[0][1][0][0]) < 1e-15);
}

TEST_CASE("directional derivatives against finite differences") {
  VectorPolynomial p(2, Point::Zero(), 1.0);
  p.x.coeff(2, 0) = 1.0;  // (x^2, 0)
  const auto g = kScalene;
  const double h = 1e-3;
  const auto c = edge_coefficients(g);
  for (int k = 0; k < 3; ++k) {
    const Point dir[2] = {g.tangents[k], g.normals[k]};
    const Point x0 = g.centroid();
    double b = 0;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        for (int l = 0; l < 2; ++l) {
          const Point u = dir[j] * h, v = dir[l] * h;
          const Eigen::Vector2d mixed = (p(x0 + u + v) - p(x0 + u - v) - p(x0 - u + v) + p(x0 - u - v)) / (4 * h * h);
          const double fd = dir[i].dot(mixed);
          CHECK(directional_D(p, g, k, i, j, l) == doctest::Approx(fd).epsilon(1e-8));
          b += c.mu[k][i][j][l] * fd;
        }
    CHECK(std::abs(apply_Bk(p, g, k) - b) < 1e-8 * std::abs(c.mu[k][0][1][1]) * 10);
  }
  VectorPolynomial lin(2, Point::Zero(), 1.0);
  lin.x.coeff(1, 0) = 2.0;
  lin.y.coeff(0, 1) = -1.0;
  lin.y.coeff(0, 0) = 5.0;
  for (int k = 0; k < 3; ++k) CHECK(apply_Bk(lin, g, k) == 0.0);
}

TEST_CASE("B_k under dilation") {
  std::mt19937_64 rng(5);
  for (int s = 0; s < 50; ++s) {
    const auto g = random_geometry(rng, 0.15);
    const auto p = vpoly(rng, Point::Zero());
    const double f = 2.5;
    const auto gs = tri(f * g.vertices[0], f * g.vertices[1], f * g.vertices[2]);
    // q(x) = p(x / f): second derivatives shrink by f^2, coefficients grow by f^4
    VectorPolynomial q(2, Point::Zero(), f);
    q.x.coefficients() = p.x.coefficients();
    q.y.coefficients() = p.y.coefficients();
    for (int k = 0; k < 3; ++k)
      CHECK(apply_Bk(q, gs, k) == doctest::Approx(f * f * apply_Bk(p, g, k)).epsilon(1e-12).scale(g.area * g.area));
  }
}

TEST_CASE("edge expansion identity") {
  std::mt19937_64 rng(7);
  double worst = 0, nontrivial = 0;
  for (int s = 0; s < 1000; ++s) {
    const auto g = random_geometry(rng, 0.1);
    const auto c = check_rt1err2(g, vpoly(rng, g.centroid()), spoly(rng, g.centroid()));
    worst = std::max(worst, c.relative());
    nontrivial = std::max(nontrivial, std::abs(c.lhs) / c.scale);
  }
  CHECK(worst <= 1e-9);
  CHECK(nontrivial > 1e-5);

  SUBCASE("linear w2 gives zero on both sides") {
    Polynomial w(2, Point::Zero(), 1.0);
    w.coeff(1, 0) = 0.7;
    w.coeff(0, 1) = -1.1;
    const auto c = check_rt1err2(kScalene, vpoly(rng, Point::Zero()), w);
    CHECK(std::abs(c.lhs) <= 1e-12);
    CHECK(std::abs(c.rhs) <= 1e-12);
  }
  SUBCASE("fields in RT_1 give zero on both sides") {
    // (a + b.x) + x (c.x) with linear a, scalar linear c
    VectorPolynomial p(2, Point::Zero(), 1.0);
    p.x.coeff(0, 0) = 0.3;
    p.x.coeff(1, 0) = 1.2;
    p.y.coeff(0, 1) = -0.4;
    p.x.coeff(2, 0) = 0.8;
    p.x.coeff(1, 1) = -0.5;
    p.y.coeff(1, 1) = 0.8;
    p.y.coeff(0, 2) = -0.5;
    const auto c = check_rt1err2(kScalene, p, spoly(rng, Point::Zero()));
    CHECK(std::abs(c.lhs) <= 1e-12);
    CHECK(std::abs(c.rhs) <= 1e-12);
  }
  SUBCASE("the identity detects a wrong coefficient") {
    // 4 l_k^2 in place of 4 l_k^4 in the second-component normal coefficient
    const auto g = kScalene;
    const auto p = vpoly(rng, Point::Zero());
    const auto w = spoly(rng, Point::Zero());
    const auto c = check_rt1err2(g, p, w);
    const double L = g.lengths[0] * g.lengths[1] * g.lengths[2];
    double rhs = c.rhs;
    for (int k = 0; k < 3; ++k) {
      const double lk = g.lengths[k], lm = g.lengths[(k + 2) % 3], lp = g.lengths[(k + 1) % 3];
      const double diff = lm * lm - lp * lp;
      const double delta = g.circumdiameter * diff * 4 * (lk * lk - std::pow(lk, 4)) / (2880 * L);
      const double d2w = g.tangents[k].dot(w.hessian(Point::Zero()) * g.tangents[k]);
      rhs += lk * delta * directional_D(p, g, k, 1, 0, 0) * d2w;
    }
    CHECK(c.relative() <= 1e-9);
    CHECK(std::abs(c.lhs - rhs) / c.scale > 1e-5);
  }
}

TEST_CASE("bubble representation") {
  std::mt19937_64 rng(11);
  for (int s = 0; s < 500; ++s) {
    const auto g = random_geometry(rng, 0.1);
    const auto c = check_rt1err1(g, vpoly(rng, g.centroid()));
    CHECK(c.representation.relative() <= 1e-9);
    CHECK(c.beta_spread <= 1e-10);
    CHECK(c.max_divergence <= 1e-11);
  }
  VectorPolynomial constant(2, Point::Zero(), 1.0);
  constant.x.coeff(0, 0) = 1.0;
  constant.y.coeff(0, 0) = -2.0;
  const auto c = check_rt1err1(kScalene, constant);
  CHECK(c.representation.residual <= 1e-14);
}

TEST_CASE("hierarchical and Laplacian formulas") {
  Polynomial r2(2, Point::Zero(), 1.0);
  r2.coeff(2, 0) = 1.0;
  r2.coeff(0, 2) = 1.0;
  const auto right = tri({0, 0}, {1, 0}, {0, 1});
  const auto h = check_hierarchy(right, r2);
  CHECK(h.laplacian.lhs == doctest::Approx(4.0));
  CHECK(h.laplacian.rhs == doctest::Approx(4.0));
  CHECK(h.interpolation.relative() <= 1e-12);

  Polynomial lin(2, Point::Zero(), 1.0);
  lin.coeff(1, 0) = 3.0;
  lin.coeff(0, 0) = 1.0;
  const auto hl = check_hierarchy(kScalene, lin);
  CHECK(hl.interpolation.residual <= 1e-14);
  CHECK(std::abs(hl.laplacian.rhs) <= 1e-12);

  std::mt19937_64 rng(13);
  for (int s = 0; s < 500; ++s) {
    const auto g = random_geometry(rng, 0.1);
    const auto c = check_hierarchy(g, spoly(rng, g.centroid()));
    CHECK(c.interpolation.relative() <= 1e-10);
    CHECK(c.laplacian.relative() <= 1e-10);
  }
}

TEST_CASE("sample points and aspect ratio") {
  CHECK(sample_points(kScalene).size() == 22);
  CHECK(aspect_ratio(kEquilateral) == doctest::Approx(2 / std::sqrt(3.0)));
  CHECK(aspect_ratio(tri({0, 0}, {10, 0}, {5, 0.5})) == doctest::Approx(20.0));
}

TEST_CASE("randomized suite") {
  VerifyOptions o;
  const auto report = run_verify_suite(o);
  CHECK(report.samples == 500);
  CHECK(report.rows.size() == 8);
  CHECK(report.pass());

  o.samples = 10000;
  const auto t0 = std::chrono::steady_clock::now();
  CHECK(run_verify_suite(o).pass());
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  MESSAGE("10000 samples in " << seconds << " s");
  CHECK(seconds < 60);

  o.samples = 1000;
  o.aspect_max = 100;
  CHECK(run_verify_suite(o).pass());

  o.aspect_max = 20;
  o.seed = 99;
  const auto a = run_verify_suite(o), b = run_verify_suite(o);
  for (size_t i = 0; i < a.rows.size(); ++i) CHECK(a.rows[i].worst == b.rows[i].worst);
}
