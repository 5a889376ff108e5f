#pragma once

#include <memory>
#include <stdexcept>

#include <Eigen/SparseCore>

#include "rtrecover/problems.hpp"
#include "rtrecover/spaces.hpp"

namespace rtrecover {

class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Block system [[A, B^T - Bb], [B, -C]] [p; u] = [G; -F] with
///   A_ij = (a q_j, q_i), B_ki = (div q_i, v_k), Bb_ik = (q_i, b v_k),
///   C_kl = (c v_l, v_k), G_i = <q_i.n, g>, F_k = (f, v_k).
/// Flux unknowns come first, then the scalar unknowns triangle by triangle.
struct MixedSystem {
  std::shared_ptr<const Mesh> mesh;
  std::shared_ptr<const RTSpace> flux_space;
  int r = 0;
  Eigen::SparseMatrix<double> matrix;
  Eigen::VectorXd rhs;

  int num_flux() const { return flux_space->size(); }
  int num_scalar() const { return mesh->num_triangles() * scalar_local_dim(r); }
  int size() const { return num_flux() + num_scalar(); }
};

/// quad_degree < 0 selects 2(r+1) + 4.
MixedSystem assemble_mixed(std::shared_ptr<const Mesh> mesh, int r, const ProblemSpec& problem,
                           int quad_degree = -1);
/// Same, reusing an existing flux space.
MixedSystem assemble_mixed(std::shared_ptr<const RTSpace> space, const ProblemSpec& problem,
                           int quad_degree = -1);

struct MixedSolution {
  RTField p;
  PiecewiseScalar u;
  double relative_residual = 0.0;
};

/// Sparse LU of the full block system. Throws SolverError if the
/// factorization fails or the residual exceeds 1e-9 |rhs|.
MixedSolution solve_mixed(const MixedSystem& system);

}  // namespace rtrecover
