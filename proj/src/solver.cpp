#include "rtrecover/solver.hpp"

#include <vector>

#include <Eigen/SparseLU>
#ifdef RTRECOVER_HAVE_UMFPACK
#include <Eigen/UmfPackSupport>
#endif

#include "rtrecover/quadrature.hpp"

namespace rtrecover {

MixedSystem assemble_mixed(std::shared_ptr<const Mesh> mesh, int r, const ProblemSpec& problem,
                           int quad_degree) {
  return assemble_mixed(std::make_shared<const RTSpace>(std::move(mesh), r), problem, quad_degree);
}

MixedSystem assemble_mixed(std::shared_ptr<const RTSpace> space, const ProblemSpec& problem,
                           int quad_degree) {
  if (!problem.f || !problem.g) throw SolverError("problem needs f and g");
  MixedSystem sys;
  sys.flux_space = space;
  sys.mesh = space->mesh_ptr();
  sys.r = space->degree();
  const Mesh& mesh = *sys.mesh;
  const int r = sys.r;
  if (quad_degree < 0) quad_degree = 2 * (r + 1) + 4;
  const int N = rt_local_dim(r);
  const int nl = scalar_local_dim(r);
  const int nflux = sys.num_flux();
  const TriangleRule& rule = triangle_rule(quad_degree);
  const EdgeRule& erule = edge_gauss(r + 5);

  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(mesh.num_triangles()) * (N * N + 3 * N * nl + nl * nl));
  sys.rhs = Eigen::VectorXd::Zero(sys.size());

  Eigen::MatrixXd A(N, N), Bt(N, nl), Bb(N, nl), C(nl, nl);
  Eigen::VectorXd F(nl), G(N);
  double psi[scalar_local_dim(3)];
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto g = geometry(mesh, t);
    const LocalRTBasis& basis = space->local_basis(t);
    A.setZero();
    Bt.setZero();
    Bb.setZero();
    C.setZero();
    F.setZero();
    G.setZero();
    for (int q = 0; q < rule.size(); ++q) {
      const Point x = g.from_barycentric(rule.points[q]);
      const double w = rule.weights[q] * g.area;
      const auto phi = basis.values(x);
      const Eigen::RowVectorXd div = basis.divergence(x);
      barycentric_monomials(r, rule.points[q], psi);
      const Eigen::Map<const Eigen::VectorXd> v(psi, nl);
      const double ax = problem.a(x);
      if (!(ax > 0.0))
        throw SolverError("coefficient a is not positive at (" + std::to_string(x.x()) + ", " +
                          std::to_string(x.y()) + ")");
      A.noalias() += (w * ax) * phi.transpose() * phi;
      Bt.noalias() += w * div.transpose() * v.transpose();
      if (!problem.b_is_zero) Bb.noalias() += w * (phi.transpose() * problem.b(x)) * v.transpose();
      if (!problem.c_is_zero) C.noalias() += (w * problem.c(x)) * v * v.transpose();
      F.noalias() += (w * problem.f(x)) * v;
    }
    for (int k = 0; k < 3; ++k) {
      const int e = mesh.triangle_edges(t)[k];
      if (!mesh.is_boundary_edge(e)) continue;
      const Point a = g.vertices[(k + 1) % 3];
      const Point b = g.vertices[(k + 2) % 3];
      for (int i = 0; i < erule.size(); ++i) {
        const Point x = a + erule.points[i] * (b - a);
        G.noalias() += (erule.weights[i] * g.lengths[k] * problem.g(x)) *
                       (basis.values(x).transpose() * g.normals[k]);
      }
    }

    const auto dofs = space->local_dofs(t);
    const int u0 = nflux + t * nl;
    for (int i = 0; i < N; ++i) {
      for (int j = 0; j < N; ++j) trip.emplace_back(dofs[i], dofs[j], A(i, j));
      for (int l = 0; l < nl; ++l) {
        trip.emplace_back(dofs[i], u0 + l, Bt(i, l) - Bb(i, l));
        trip.emplace_back(u0 + l, dofs[i], Bt(i, l));
      }
      sys.rhs(dofs[i]) += G(i);
    }
    for (int k = 0; k < nl; ++k) {
      for (int l = 0; l < nl; ++l)
        if (!problem.c_is_zero) trip.emplace_back(u0 + k, u0 + l, -C(k, l));
      sys.rhs(u0 + k) = -F(k);
    }
  }
  sys.matrix.resize(sys.size(), sys.size());
  sys.matrix.setFromTriplets(trip.begin(), trip.end());
  sys.matrix.makeCompressed();
  return sys;
}

namespace {

template <class Solver>
Eigen::VectorXd factor_and_solve(Solver& solver, const MixedSystem& sys) {
  solver.compute(sys.matrix);
  if (solver.info() != Eigen::Success) throw SolverError("sparse factorization failed");
  Eigen::VectorXd x = solver.solve(sys.rhs);
  if (solver.info() != Eigen::Success) throw SolverError("sparse solve failed");
  const double bnorm = sys.rhs.norm();
  // a couple of refinement sweeps in case pivoting lost digits
  for (int it = 0; it < 3; ++it) {
    const Eigen::VectorXd res = sys.rhs - sys.matrix * x;
    if (res.norm() <= 1e-12 * bnorm) break;
    x += solver.solve(res);
  }
  return x;
}

}  // namespace

MixedSolution solve_mixed(const MixedSystem& sys) {
  Eigen::VectorXd x;
#ifdef RTRECOVER_HAVE_UMFPACK
  Eigen::UmfPackLU<Eigen::SparseMatrix<double>> solver;
  x = factor_and_solve(solver, sys);
#else
  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> solver;
  x = factor_and_solve(solver, sys);
#endif
  const double bnorm = sys.rhs.norm();
  const double res = (sys.rhs - sys.matrix * x).norm();
  const double rel = bnorm > 0 ? res / bnorm : res;
  if (!std::isfinite(rel) || rel > 1e-9)
    throw SolverError("mixed solve residual " + std::to_string(rel) + " exceeds tolerance");

  MixedSolution sol{RTField(sys.flux_space, x.head(sys.num_flux())), PiecewiseScalar(sys.mesh, sys.r), rel};
  sol.u.coefficients() = x.tail(sys.num_scalar());
  return sol;
}

}  // namespace rtrecover
