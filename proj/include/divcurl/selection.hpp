#pragma once

// Annulus selection: good-radii sets U_n, cap-maximal profiles T_{n,k},
// exceptional sets E_{n,k}, and sphere-trace convergence on selected radii.

#include <optional>
#include <vector>

#include "divcurl/geometry.hpp"
#include "divcurl/intervals.hpp"
#include "divcurl/lorentz.hpp"

namespace divcurl {

enum class NormKind {
  Lq,              ///< int_S |Du_n|^q + |Du|^q ds
  LorentzNMinus1,  ///< || |Du_n| + |Du| ||_{L^{N-1,1}(S)}
};

struct SelectionConfig {
  double q = 1.0;
  double lambda = 1.0;
  IntervalSet base;  ///< U, a closed subset of [R0, R]
  NormKind norm_kind = NormKind::Lq;
  /// Use finite-difference Jacobians when a field has no analytic one.
  bool fd_fallback = false;
};

/// Radial profile of the sphere-integrated gradient density. The profile is
/// the midpoint value per grid panel; `panel_mass` is the Gauss-integrated
/// volume integral int_{panel} r^{N-1} int_S Lambda ds dr of each panel.
struct GradientProfile {
  int dim = 0;
  NormKind norm_kind = NormKind::Lq;
  double q = 1.0;
  std::vector<RadialGrid::Panel> panels;
  std::vector<double> midpoints;
  StepFunction profile;
  std::vector<double> panel_mass;
  /// Lorentz kind only: Lambda at the volume nodes of each panel, weighted by
  /// the volume element.
  std::vector<WeightedSamples> panel_samples;

  double r_inner() const { return panels.front().lo; }
  double r_outer() const { return panels.back().hi; }
};

struct SelectionResult {
  IntervalSet selected;        ///< U_n
  double measure_removed = 0;  ///< |U \ U_n|
  double bound_rhs = 0;        ///< certified right side of the measure bound
  /// lambda^{-1} * sum over removed panels of |panel| * profile: the first
  /// link of the chain lambda |U \ U_n| <= int_{U\U_n} profile.
  double chain_middle = 0;
  bool bound_holds = false;
  std::vector<double> selected_radii;  ///< midpoints of selected panels
  StepFunction profile;
  double lambda = 0;
};

GradientProfile gradient_sphere_profile(const VectorField& u_n, const VectorField& u,
                                        const SelectionConfig& cfg, const Point& x0,
                                        const RadialGrid& grid, const SphereQuad& quad);

/// U_n = {r in U : profile(r) <= lambda}, resolved per profile panel, with the
/// measure bound evaluated and checked. U must be a union of whole panels.
SelectionResult select_good_radii(const GradientProfile& profile, const SelectionConfig& cfg);

struct TraceNorm {
  enum class Kind { Ls, C0, X1NMinus1 };
  Kind kind = Kind::Ls;
  double s = 2.0;

  static TraceNorm ls(double s) { return {Kind::Ls, s}; }
  static TraceNorm c0() { return {Kind::C0, 0.0}; }
  static TraceNorm x1() { return {Kind::X1NMinus1, 0.0}; }
};

/// Critical sphere Sobolev exponent q*_{N-1} = (1/q - 1/(N-1))^{-1} (q < N-1);
/// infinity otherwise.
double sphere_sobolev_exponent(double q, int dim);

/// sup over r in U_n of ||(v_n - v)(r, .)|| in the chosen trace space, sampled
/// on the sphere nodes. Returns 0 when U_n is empty.
double trace_convergence_sup(const VectorField& u_n, const VectorField& u,
                             const SelectionResult& result, TraceNorm target, const Point& x0,
                             const SphereQuad& quad, const SelectionConfig& cfg);

/// ||w||_X of one sphere trace w(y) = (u_n - u)(x0 + r y).
double trace_norm(const VectorField& u_n, const VectorField& u, double r, TraceNorm target,
                  const Point& x0, const SphereQuad& quad);

struct CapMaximalProfile {
  int dim = 0;
  NormKind norm_kind = NormKind::Lq;
  double h = 0;
  std::vector<RadialGrid::Panel> panels;
  std::vector<double> radii;
  std::vector<double> values;       ///< T(r) per radius (lower bound of the ess-sup)
  std::vector<Eigen::Index> argmax;  ///< maximizing candidate centre (node index)
  StepFunction profile;
};

/// T(r) = max over candidate centres z (the sphere nodes) of the cap mass
/// int_{B(z,h) cap S} Lambda(x0 + r y) ds, or of the L^{N-1,1} norm of Lambda
/// restricted to the cap. Finite candidates make T a lower bound of the sup.
CapMaximalProfile cap_maximal_profile(const ScalarField& density, double h, const Point& x0,
                                      const RadialGrid& grid, const SphereQuad& quad,
                                      NormKind norm_kind);

struct ExceptionalSet {
  IntervalSet set;
  double measure = 0;
  double threshold = 0;  ///< epsilon / 2^k
  double bound = 0;
};

/// E_{n,k} = {r : T(r) > epsilon/2^k} with the bound it must satisfy when the
/// cap radius was chosen from the equi-integrability modulus.
ExceptionalSet exceptional_set(const CapMaximalProfile& t, double epsilon, int k, double r_inner,
                               double r_outer);

/// Largest delta (bisection in log scale) such that the modulus of every
/// member stays below epsilon^2 / 4^k.
double equiintegrability_delta(const std::vector<WeightedSamples>& family, double epsilon, int k,
                               ModulusMode mode);

/// Cap chord radius h with cap_area(h) (R^N - R0^N)/N < delta.
double cap_radius_for_delta(double delta, int dim, double r_inner, double r_outer);

}  // namespace divcurl
