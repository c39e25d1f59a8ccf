#pragma once

// Explicit sequences: the axial div-curl counterexample pair (sigma_n, eta_n),
// the concentrating Jacobian map u_n = (1-r)^n (n x', x_N), and the exact
// Beta-integral asymptotic n^{k+1} int_0^1 r^k (1-r)^{n alpha} dr.
//
// All fields live on the infinite cylinder {|x'| < 1}; r = |x'| throughout.
// Where a formula needs the direction x'/|x'| the evaluators return 0 on the
// axis, which is flagged through the field's singular set.

#include <cstdint>
#include <vector>

#include "divcurl/geometry.hpp"

namespace divcurl {

/// Exponent q of the critical pair: 1/q = 1 + 1/(N-1) - 1/p.
double critical_q(int dim, double p);

struct CounterexamplePair {
  int dim = 0;
  double p = 1.0;
  double p_conj = 0.0;  ///< p' (infinity for p = 1)
  double q = 1.0;
  int n = 1;
  VectorField sigma;
  VectorField eta;
  ScalarField potential;  ///< eta = grad(potential)
};

/// sigma_n = n^{(N-1)/p} (1-r)^n e_N and
/// eta_n = n^{(N-1)/p'} grad((1-r)^n x_N), for p in [1, N-1].
CounterexamplePair counterexample_fields(int dim, double p, int n);

/// Domain shared by the sequence fields: {|x'| < 1} x R.
Domain sequence_domain(int dim);

/// Fixed-seed uniform cloud in B'_1 x (0,1) with |x'| in [r_min, r_max] and
/// x_N in [margin, 1 - margin].
std::vector<Point> interior_cloud(int dim, std::size_t count, std::uint64_t seed,
                                  double r_min = 0.01, double r_max = 0.99, double margin = 0.01);

struct StructureReport {
  double div_sigma = 0;        ///< max |div sigma_n| by finite differences
  double curl_eta = 0;         ///< max |curl eta_n| by finite differences
  double gradient_mismatch = 0;  ///< max |eta_n - grad(potential)|
  std::size_t samples = 0;
  double tol = 0;
  bool pass = false;
};

StructureReport verify_structure(const CounterexamplePair& pair, double tol,
                                 const std::vector<Point>& cloud);

/// Negative controls: f + x_1 e_1 (divergence 1) and f + x_1 e_2 (curl 1).
VectorField add_divergence(const VectorField& f);
VectorField add_curl(const VectorField& f);

struct BetaAsymptotic {
  int k = 0;
  double alpha = 1.0;
  int n = 1;

  /// k! / alpha^{k+1}
  double limit() const;
};

/// Exact n^{k+1} B(k+1, n alpha + 1) = n^{k+1} k! / prod_{j=1}^{k+1}(n alpha + j).
double beta_asymptotic_value(const BetaAsymptotic& b);

/// u_n(x) = (1-r)^n (n x', x_N) with its analytic Jacobian.
VectorField jacobian_example_field(int dim, int n);

/// n^{N-1}(1-r)^{nN} - n^N r (1-r)^{nN-1}.
double jacobian_example_det(int dim, int n, double r);

enum class SupComponent {
  Tangential,  ///< max over r of |u_n'| = n r (1-r)^n
  Full,        ///< sup over B'_1 x (0,1) of |u_n|, approached as x_N -> 1
};

/// Numerical 1-D maximization (grid scan followed by golden-section
/// refinement) of the radial profile of |u_n|.
double jacobian_example_sup(int n, SupComponent which);

/// Maximizer of g on [a, b]: scan `samples` points, then golden section on
/// the bracketing cell.
double maximize_1d(const std::function<double(double)>& g, double a, double b, int samples = 2000);

}  // namespace divcurl
