#pragma once

#include <functional>
#include <string>

#include "rtrecover/spaces.hpp"

namespace rtrecover {

/// Data of  a p - b u - grad u = 0,  -div p + c u = f  in Omega,  u = g on the boundary.
/// The exact fields are optional and only used for error measurement.
struct ProblemSpec {
  std::string name;
  ScalarFunction a = [](const Point&) { return 1.0; };
  VectorFunction b = [](const Point&) { return Vec2(0.0, 0.0); };
  ScalarFunction c = [](const Point&) { return 0.0; };
  ScalarFunction f;
  ScalarFunction g;
  bool b_is_zero = true;
  bool c_is_zero = true;

  ScalarFunction u;
  VectorFunction p;
  ScalarFunction div_p;

  bool has_exact() const { return static_cast<bool>(u) && static_cast<bool>(p); }
};

/// u = exp(x+y) sin(2 pi x) sin(pi y) on the unit square, Poisson.
/// With `reaction` > 0 the same u solves -div grad u + reaction u = f.
ProblemSpec problem_smooth(double reaction = 0.0);

/// Corner singularity on the slit square: u = rho^g sin(g theta) - rho^2/4,
/// g = pi / (2 pi - omega), f = 1.
ProblemSpec problem_slit();

/// f = g = 0.
ProblemSpec problem_zero();

}  // namespace rtrecover
