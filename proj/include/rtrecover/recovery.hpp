#pragma once

#include <stdexcept>

#include <Eigen/Core>

#include "rtrecover/mesh.hpp"
#include "rtrecover/polynomial.hpp"
#include "rtrecover/spaces.hpp"

namespace rtrecover {

class RecoveryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RecoveryOptions {
  /// A patch is accepted once sigma_min / sigma_max of its matrix reaches this.
  double rank_threshold = 1e-8;
  /// Boundary vertex patches are enlarged until they hold this many triangles.
  int min_boundary_triangles = 8;
};

/// Local least-squares problem at vertex z: rows are the RT_r functionals of
/// every patch edge and triangle applied to the monomial basis of P_{r+1}^2 in
/// (x - z) / scale; columns list the x-component monomials, then the y ones.
struct PatchLS {
  int vertex = -1;
  int r = 0;
  Patch patch;
  Point center;
  double scale = 1.0;
  Eigen::MatrixXd A;
  Eigen::VectorXd d;
  Eigen::VectorXd singular_values;

  double rank_ratio() const;
};

/// Matrix of the patch functionals (no data). Edge rows use the point form
/// q(g_j).n_e in the global edge direction.
Eigen::MatrixXd patch_matrix(const Mesh& mesh, const Patch& patch, int r, const Point& center,
                             double scale);

/// Sufficient condition for a unique fit on the star of z. r = 0: at least
/// five triangles and every two triangles sharing an edge through z have
/// angles at z summing to at most pi. r = 1: at least four triangles.
/// r >= 2: numerical rank of the star matrix against the default threshold.
bool check_uniqueness(const Mesh& mesh, int z, int r);

/// Fixed patch, no enlargement.
PatchLS assemble_patch_ls(const RTField& ph, int z, const Patch& patch);

/// Star of z, enlarged one layer at a time until the rank and size criteria hold.
PatchLS build_patch_ls(const RTField& ph, int z, const RecoveryOptions& options = {});

/// Least-squares solution by Householder QR of A.
VectorPolynomial solve_patch_ls(const PatchLS& ls);

/// Continuous degree-(r+1) field: vertex values q_z(z), edge and interior
/// nodes blended from the vertex polynomials with barycentric weights.
LagrangeVecField recover(const RTField& ph, const RecoveryOptions& options = {});

}  // namespace rtrecover
