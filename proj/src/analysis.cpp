#include "rtrecover/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "rtrecover/quadrature.hpp"

namespace rtrecover {

int mixed_ndof(const Mesh& mesh, int r) {
  return (r + 1) * mesh.num_edges() + r * (r + 1) * mesh.num_triangles() +
         scalar_local_dim(r) * mesh.num_triangles();
}

double l2_error_vec(const VectorFunction& exact, const PiecewiseVectorFunction& field, const Mesh& mesh,
                    int quad_degree) {
  const TriangleRule& rule = triangle_rule(quad_degree);
  double sum = 0.0;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto g = geometry(mesh, t);
    double local = 0.0;
    for (int q = 0; q < rule.size(); ++q) {
      const Point x = g.from_barycentric(rule.points[q]);
      local += rule.weights[q] * (exact(x) - field(t, x)).squaredNorm();
    }
    sum += g.area * local;
  }
  return std::sqrt(sum);
}

double l2_error_scalar(const ScalarFunction& exact, const std::function<double(int, const Point&)>& field,
                       const Mesh& mesh, int quad_degree) {
  const TriangleRule& rule = triangle_rule(quad_degree);
  double sum = 0.0;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto g = geometry(mesh, t);
    double local = 0.0;
    for (int q = 0; q < rule.size(); ++q) {
      const Point x = g.from_barycentric(rule.points[q]);
      const double d = exact(x) - field(t, x);
      local += rule.weights[q] * d * d;
    }
    sum += g.area * local;
  }
  return std::sqrt(sum);
}

std::vector<double> estimator(const RTField& ph, const LagrangeVecField& recovered, int quad_degree) {
  const Mesh& mesh = ph.space().mesh();
  if (quad_degree < 0) quad_degree = 2 * (ph.degree() + 2) + 6;
  const TriangleRule& rule = triangle_rule(quad_degree);
  std::vector<double> etas(mesh.num_triangles());
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto g = geometry(mesh, t);
    double local = 0.0;
    for (int q = 0; q < rule.size(); ++q) {
      const Point x = g.from_barycentric(rule.points[q]);
      local += rule.weights[q] * (recovered.eval(t, x) - ph.eval(t, x)).squaredNorm();
    }
    etas[t] = std::sqrt(g.area * local);
  }
  return etas;
}

std::vector<int> dorfler_mark(std::span<const double> etas, double theta) {
  if (!(theta > 0.0 && theta < 1.0)) throw std::invalid_argument("theta must lie in (0, 1)");
  std::vector<int> order(etas.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return etas[a] * etas[a] > etas[b] * etas[b]; });
  double total = 0.0;
  for (double e : etas) total += e * e;
  std::vector<int> marked;
  if (total <= 0.0) return marked;
  double acc = 0.0;
  for (int t : order) {
    if (acc >= theta * total) break;
    marked.push_back(t);
    acc += etas[t] * etas[t];
  }
  return marked;
}

double fit_order(std::span<const double> errors, std::span<const double> ndofs) {
  if (errors.size() != ndofs.size() || errors.size() < 2)
    throw std::invalid_argument("fit_order needs at least two matching entries");
  const std::size_t n = errors.size();
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(errors[i] > 0.0) || !(ndofs[i] > 0.0)) throw std::invalid_argument("fit_order needs positive values");
    mx += std::log(ndofs[i]);
    my += std::log(errors[i]);
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = std::log(ndofs[i]) - mx;
    sxy += dx * (std::log(errors[i]) - my);
    sxx += dx * dx;
  }
  if (sxx == 0.0) throw std::invalid_argument("fit_order needs distinct ndof values");
  return -2.0 * sxy / sxx;
}

LevelResult solve_and_measure(std::shared_ptr<const Mesh> mesh, int r, const ProblemSpec& problem,
                              int quad_degree) {
  const int err_degree = std::min(20, quad_degree < 0 ? 2 * (r + 2) + 6 : std::max(quad_degree, 2 * (r + 2) + 6));
  const MixedSystem sys = assemble_mixed(mesh, r, problem, quad_degree);
  LevelResult out{ErrorReport{}, solve_mixed(sys), {}};
  const RTField& ph = out.solution.p;
  const PiecewiseScalar& uh = out.solution.u;
  ErrorReport& rep = out.report;
  rep.nt = mesh->num_triangles();
  rep.ndof = sys.size();

  const LagrangeVecField rec = recover(ph);
  out.etas = estimator(ph, rec, err_degree);
  double eta2 = 0.0;
  for (double e : out.etas) eta2 += e * e;
  rep.eta = std::sqrt(eta2);

  const PiecewiseVectorFunction ph_eval = [&](int t, const Point& x) { return ph.eval(t, x); };
  if (problem.p) {
    rep.e_p = l2_error_vec(problem.p, ph_eval, *mesh, err_degree);
    rep.e_rec = l2_error_vec(problem.p, [&](int t, const Point& x) { return rec.eval(t, x); }, *mesh, err_degree);
    const RTField Pi = interpolate_rt(sys.flux_space, problem.p, err_degree);
    rep.e_close = l2_error_vec([](const Point&) { return Vec2(0.0, 0.0); },
                               [&](int t, const Point& x) { return Vec2(Pi.eval(t, x) - ph.eval(t, x)); },
                               *mesh, err_degree);
    rep.e_div_close = l2_error_scalar([](const Point&) { return 0.0; },
                                      [&](int t, const Point& x) { return Pi.eval_div(t, x) - ph.eval_div(t, x); },
                                      *mesh, err_degree);
    rep.efficiency = rep.e_p > 0 ? rep.eta / rep.e_p : 0.0;
  }
  if (problem.div_p)
    rep.e_div = l2_error_scalar(problem.div_p, [&](int t, const Point& x) { return ph.eval_div(t, x); }, *mesh,
                                err_degree);
  if (problem.u) {
    const auto uh_eval = [&](int t, const Point& x) { return uh.eval(t, x); };
    rep.e_u = l2_error_scalar(problem.u, uh_eval, *mesh, err_degree);
    const PiecewiseScalar Pu = project_l2(mesh, r, problem.u, err_degree);
    rep.e_u_close = l2_error_scalar([](const Point&) { return 0.0; },
                                    [&](int t, const Point& x) { return Pu.eval(t, x) - uh.eval(t, x); }, *mesh,
                                    err_degree);
  }
  return out;
}

AfemResult afem_loop(std::shared_ptr<const Mesh> initial, const ProblemSpec& problem, int r, double theta,
                     long max_ndof, int quad_degree, const std::function<void(const ErrorReport&)>& on_level,
                     int max_levels) {
  AfemResult result;
  result.mesh = std::move(initial);
  for (int level = 0;; ++level) {
    if (level > 0 && mixed_ndof(*result.mesh, r) > max_ndof) break;
    auto lr = [&] {
      try {
        return solve_and_measure(result.mesh, r, problem, quad_degree);
      } catch (const std::exception& ex) {
        throw std::runtime_error("adaptive iteration " + std::to_string(level) + ": " + ex.what());
      }
    }();
    lr.report.level = level;
    result.reports.push_back(lr.report);
    if (on_level) on_level(lr.report);
    const auto marked = dorfler_mark(lr.etas, theta);
    if (marked.empty() || (max_levels > 0 && level + 1 >= max_levels)) break;
    result.mesh = std::make_shared<const Mesh>(refine_adaptive(*result.mesh, marked));
  }
  return result;
}

void write_csv(std::ostream& out, const std::vector<ErrorReport>& reports) {
  out << "level,nt,ndof,e_p,e_div,e_close,e_rec,e_u,eta,efficiency\n";
  char buf[64];
  auto sci = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.3e", v);
    return std::string(buf);
  };
  for (const auto& r : reports) {
    out << r.level << ',' << r.nt << ',' << r.ndof << ',' << sci(r.e_p) << ',' << sci(r.e_div) << ','
        << sci(r.e_close) << ',' << sci(r.e_rec) << ',' << sci(r.e_u) << ',' << sci(r.eta) << ','
        << sci(r.efficiency) << '\n';
  }
}

}  // namespace rtrecover
