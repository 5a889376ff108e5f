#include "rtrecover/problems.hpp"

#include <cmath>
#include <numbers>

#include "rtrecover/mesh_generators.hpp"

namespace rtrecover {

using std::numbers::pi;

ProblemSpec problem_smooth(double reaction) {
  ProblemSpec P;
  P.name = reaction == 0.0 ? "smooth" : "smooth-reaction";
  auto u = [](const Point& x) {
    return std::exp(x.x() + x.y()) * std::sin(2 * pi * x.x()) * std::sin(pi * x.y());
  };
  auto grad = [](const Point& x) {
    const double e = std::exp(x.x() + x.y());
    const double s2 = std::sin(2 * pi * x.x()), c2 = std::cos(2 * pi * x.x());
    const double s1 = std::sin(pi * x.y()), c1 = std::cos(pi * x.y());
    return Vec2(e * (s2 + 2 * pi * c2) * s1, e * s2 * (s1 + pi * c1));
  };
  auto lap = [](const Point& x) {
    const double e = std::exp(x.x() + x.y());
    const double s2 = std::sin(2 * pi * x.x()), c2 = std::cos(2 * pi * x.x());
    const double s1 = std::sin(pi * x.y()), c1 = std::cos(pi * x.y());
    return e * s1 * ((1 - 4 * pi * pi) * s2 + 4 * pi * c2) + e * s2 * ((1 - pi * pi) * s1 + 2 * pi * c1);
  };
  P.u = u;
  P.g = u;
  P.p = grad;
  P.div_p = lap;
  P.f = [u, lap, reaction](const Point& x) { return -lap(x) + reaction * u(x); };
  if (reaction != 0.0) {
    P.c = [reaction](const Point&) { return reaction; };
    P.c_is_zero = false;
  }
  return P;
}

ProblemSpec problem_slit() {
  ProblemSpec P;
  P.name = "slit";
  const double omega = slit_angle();
  const double gamma = pi / (2 * pi - omega);
  auto angle = [omega](const Point& x) {
    double phi = std::atan2(x.y(), x.x());
    if (phi < 0.5 * omega) phi += 2 * pi;
    return phi;
  };
  P.u = [=](const Point& x) {
    const double rho = x.norm();
    if (rho == 0.0) return 0.0;
    return std::pow(rho, gamma) * std::sin(gamma * (angle(x) - omega)) - 0.25 * rho * rho;
  };
  P.g = P.u;
  P.p = [=](const Point& x) {
    const double rho = x.norm();
    if (rho == 0.0) return Vec2(0.0, 0.0);
    const double phi = angle(x);
    const double th = phi - omega;
    const double s = gamma * std::pow(rho, gamma - 1);
    return Vec2(s * std::sin(gamma * th - phi) - 0.5 * x.x(), s * std::cos(gamma * th - phi) - 0.5 * x.y());
  };
  P.div_p = [](const Point&) { return -1.0; };
  P.f = [](const Point&) { return 1.0; };
  return P;
}

ProblemSpec problem_zero() {
  ProblemSpec P;
  P.name = "zero";
  P.f = [](const Point&) { return 0.0; };
  P.g = [](const Point&) { return 0.0; };
  P.u = P.g;
  P.p = [](const Point&) { return Vec2(0.0, 0.0); };
  P.div_p = P.g;
  return P;
}

}  // namespace rtrecover
