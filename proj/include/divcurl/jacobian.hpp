#pragma once

// Cofactor matrices, the divergence-form determinant Det(Du) tested against
// W^{1,inf} functions, and its comparison with the pointwise determinant.

#include <string>
#include <vector>

#include "divcurl/geometry.hpp"
#include "divcurl/pairing.hpp"

namespace divcurl {

/// Signed minors of a 2x2 or 3x3 matrix: cof(J)^T J = det(J) I.
template <class Derived>
Matrix cofactor(const Eigen::MatrixBase<Derived>& J) {
  const Eigen::Index n = J.rows();
  if (n != J.cols() || n < 2 || n > 3) {
    throw Error(ErrorCode::UnsupportedDimension, "cofactor needs a 2x2 or 3x3 matrix");
  }
  Matrix c(n, n);
  if (n == 2) {
    c << J(1, 1), -J(1, 0), -J(0, 1), J(0, 0);
    return c;
  }
  for (int i = 0; i < 3; ++i) {
    const int i1 = (i + 1) % 3, i2 = (i + 2) % 3;
    for (int j = 0; j < 3; ++j) {
      const int j1 = (j + 1) % 3, j2 = (j + 2) % 3;
      c(i, j) = J(i1, j1) * J(i2, j2) - J(i1, j2) * J(i2, j1);
    }
  }
  return c;
}

/// -int u^1 sum_j cof(Du)_{1j} d_j psi dx (first row of the divergence form).
double distributional_det_pairing(const VectorField& u, const TestFunction& psi,
                                  const Cubature& cub);

/// int det(Du) psi dx.
double pointwise_det_pairing(const VectorField& u, const TestFunction& psi, const Cubature& cub);

struct DetConsistencyReport {
  std::vector<double> distributional;
  std::vector<double> pointwise;
  double max_abs_diff = 0;
  double max_rel_diff = 0;
  double tol = 0;
  bool pass = false;  ///< max_rel_diff <= tol
};

DetConsistencyReport det_consistency(const VectorField& u, const std::vector<TestFunction>& family,
                                     const Cubature& cub, double tol);

/// max over the cloud of |Div(row 1 of cof(Du))| by central differences.
/// With `graded_axis` the step shrinks to 1% of the distance to the axis
/// {x' = 0} wherever that is smaller than the default step.
double piola_residual(const VectorField& u, const std::vector<Point>& cloud, double h = 0.0,
                      bool graded_axis = false);

struct NamedMap {
  std::string name;
  VectorField map;
};

/// Polynomial maps with analytic Jacobians, in dimensions 2 and 3.
std::vector<NamedMap> polynomial_test_maps();

/// u = (x_1 + 1{x_1 > c}, x_2, ...) with the a.e. Jacobian (the identity):
/// the distributional and pointwise determinants disagree by the jump.
VectorField jump_map(int dim, double c = 0.1);

/// u_n = u + (sin(n x_N)/n^2, sin(n x_1)/n, 0): a smooth family converging
/// weakly to u with uniformly small |grad u_n^1 - grad u^1|.
VectorField oscillating_perturbation(const VectorField& u, int n);

}  // namespace divcurl
