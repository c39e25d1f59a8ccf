#pragma once

// Duality pairings against test functions, power-law extrapolation of
// pairing ladders, concentration-coefficient estimation on the cylinder axis,
// and radial flux profiles through concentric spheres.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "divcurl/geometry.hpp"
#include "divcurl/intervals.hpp"
#include "divcurl/lorentz.hpp"

namespace divcurl {

/// Type-erased W^{1,inf} test function with its gradient and a predicate
/// telling whether its support fits inside a given domain.
struct TestFunction {
  std::function<double(const Point&)> value;
  std::function<Point(const Point&)> gradient;
  std::function<bool(const Domain&)> supported_in;
  std::string label;

  double operator()(const Point& x) const { return value(x); }
};

/// a psi1 + b psi2, supported where both are.
TestFunction combine(double a, const TestFunction& psi1, double b, const TestFunction& psi2);

/// psi(x) = phi(|x - x0|) with phi = 0 on [R, inf).
struct RadialTestFunction {
  Point x0;
  double R = 1.0;
  std::function<double(double)> phi;
  std::function<double(double)> dphi;
  /// Optional restriction: phi' must vanish off this set of radii.
  std::optional<IntervalSet> derivative_support;

  /// (1 - r^2/R^2)^k on [0, R].
  static RadialTestFunction bump(Point x0, double R, int k = 4);

  double value(double r) const { return r >= R ? 0.0 : phi(r); }
  TestFunction as_test() const;
  /// Samples phi' on [0, R] off `derivative_support`; true when it vanishes.
  bool satisfies_restriction(int samples = 4000) const;
};

/// psi(x) = chi(|x'|) g(x_N) on B'_1 x (0, 1), chi(1) = 0.
struct CylinderTestFunction {
  std::function<double(double)> chi;
  std::function<double(double)> dchi;
  std::function<double(double)> g;
  std::function<double(double)> dg;
  std::string label;

  double chi_at_axis() const { return chi(0.0); }
  /// int_0^1 g dx_N by Gauss-Legendre.
  double g_integral() const;
  TestFunction as_test() const;

  /// chi(t) = (1 - t^2)^2 with g = 1, g = x_N and g = 1 + x_N^2.
  static std::vector<CylinderTestFunction> standard_family();
};

/// int f psi dx over the cubature points. Throws SupportViolation when psi
/// does not fit in f's domain.
double pair(const ScalarField& f, const TestFunction& psi, const Cubature& cub);

/// Composed radial x sphere cubature of the ball B(x0, R).
Cubature ball_cubature(const RadialTestFunction& psi, int radial_panels, int radial_order,
                       int sphere_order);

/// Cubature of B'_1 x (0,1) graded toward the axis (geometric radial panels).
Cubature axis_graded_cubature(int dim, int radial_panels = 32, int radial_order = 16,
                              int angular = 16, int axial_order = 8);

struct PairingTable {
  std::string label;
  std::vector<int> n;
  std::vector<double> values;
  int quad_order = 0;

  void push(int index, double value);
  std::size_t size() const noexcept { return n.size(); }
};

struct LimitEstimate {
  double value = 0;
  double rate = 0;      ///< fitted beta of c n^{-beta}; 0 when the ladder is constant
  double residual = 0;  ///< RMS misfit on the fitted points
  std::size_t fitted = 0;
};

/// Fits v_n = v + c n^{-beta} by least squares on the last half of the table.
LimitEstimate limit_extrapolate(const PairingTable& table);

struct ConcentrationEstimate {
  std::vector<double> coefficients;  ///< one per family member
  double mean = 0;
  double spread = 0;           ///< max - min over the family
  double relative_spread = 0;  ///< spread / |mean|
  bool pointwise_vanishing = false;
  bool detected = false;
};

/// c_psi = lim <f_n, psi> / (chi(0) int_0^1 g). Detection requires a relative
/// spread below 5% and `pointwise_vanishing` (supplied by the caller).
ConcentrationEstimate concentration_coefficient(const std::vector<PairingTable>& tables,
                                                const std::vector<CylinderTestFunction>& family,
                                                bool pointwise_vanishing);

/// max |f| over sample points with |x'| >= r_min in B'_1 x [0,1].
double offaxis_sup(const ScalarField& f, double r_min, int radial_samples = 200,
                   int axial_samples = 5, int angular_samples = 8);

struct RadialFluxProfile {
  std::vector<double> radii;
  std::vector<double> values;  ///< h(r) = r^{N-1} int_S f . y ds
  WeightedSamples samples;     ///< |h| weighted by the radial Gauss weights

  double max_abs() const;
};

RadialFluxProfile radial_flux_profile(const VectorField& f, const Point& x0, double R,
                                      const RadialGrid& grid, const SphereQuad& quad);

struct WeakNullReport {
  std::vector<PairingTable> tables;  ///< one per (component, test function)
  std::vector<LimitEstimate> limits;
  double max_abs_limit = 0;
  PairingTable norms;  ///< ||f_n||_{L^p} by quadrature
  double norm_log_slope = 0;
  bool norms_bounded = false;
  double tol = 0;
  bool pass = false;
};

/// Pairs every component of every ladder member with every test function,
/// extrapolates, and tracks the L^p norms. Passes when all limits are within
/// `tol` of zero and the norms stay bounded.
WeakNullReport weak_null_check(const std::vector<int>& ladder,
                               const std::function<VectorField(int)>& member,
                               const std::vector<TestFunction>& family, const Cubature& cub,
                               double p, double tol);

/// (int |f|^p)^{1/p} for a vector field over the cubature.
double lp_norm(const VectorField& f, const Cubature& cub, double p);

}  // namespace divcurl
