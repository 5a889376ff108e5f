#pragma once

#include <functional>
#include <iosfwd>
#include <memory>
#include <span>
#include <vector>

#include "rtrecover/problems.hpp"
#include "rtrecover/recovery.hpp"
#include "rtrecover/solver.hpp"

namespace rtrecover {

struct ErrorReport {
  int level = 0;
  int nt = 0;
  int ndof = 0;
  double e_p = 0;        // |p - p_h|
  double e_div = 0;      // |div(p - p_h)|
  double e_close = 0;    // |Pi p - p_h|
  double e_rec = 0;      // |p - R p_h|
  double e_u = 0;        // |u - u_h|
  double eta = 0;        // (sum eta_T^2)^{1/2}
  double efficiency = 0; // eta / e_p
  double e_div_close = 0;  // |div(Pi p - p_h)|
  double e_u_close = 0;    // |P u - u_h|
};

/// Total dimension of the mixed system on this mesh.
int mixed_ndof(const Mesh& mesh, int r);

/// (sum_T int_T |exact - field|^2)^{1/2} with a rule of the given degree.
double l2_error_vec(const VectorFunction& exact, const PiecewiseVectorFunction& field,
                    const Mesh& mesh, int quad_degree);
double l2_error_scalar(const ScalarFunction& exact, const std::function<double(int, const Point&)>& field,
                       const Mesh& mesh, int quad_degree);

/// eta_T = |R p_h - p_h|_{0,T}.
std::vector<double> estimator(const RTField& ph, const LagrangeVecField& recovered, int quad_degree = -1);

/// Smallest set of largest indicators whose squares reach theta of the total.
/// Ties are broken by triangle index. All-zero indicators give an empty set.
std::vector<int> dorfler_mark(std::span<const double> etas, double theta);

/// p with error ~ ndof^{-p/2}, from a least-squares line in log-log scale.
double fit_order(std::span<const double> errors, std::span<const double> ndofs);

struct LevelResult {
  ErrorReport report;
  MixedSolution solution;
  std::vector<double> etas;
};

/// Solve, recover, estimate and measure every error that the problem's exact
/// data allows. quad_degree < 0 uses the defaults (assembly 2(r+1)+4,
/// errors 2(r+2)+6).
LevelResult solve_and_measure(std::shared_ptr<const Mesh> mesh, int r, const ProblemSpec& problem,
                              int quad_degree = -1);

struct AfemResult {
  std::vector<ErrorReport> reports;
  std::shared_ptr<const Mesh> mesh;
};

/// SOLVE -> ESTIMATE -> MARK -> REFINE with Dorfler marking and regular
/// refinement plus closure. Stops before solving on a mesh whose ndof exceeds
/// max_ndof, after max_levels solves (if positive), or when nothing is marked.
AfemResult afem_loop(std::shared_ptr<const Mesh> initial, const ProblemSpec& problem, int r, double theta,
                     long max_ndof, int quad_degree = -1,
                     const std::function<void(const ErrorReport&)>& on_level = {}, int max_levels = 0);

/// level,nt,ndof,e_p,e_div,e_close,e_rec,e_u,eta,efficiency (4 significant digits).
void write_csv(std::ostream& out, const std::vector<ErrorReport>& reports);

}  // namespace rtrecover
