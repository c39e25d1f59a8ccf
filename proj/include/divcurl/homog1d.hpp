#pragma once

// One-dimensional homogenization bench: -(a_n u_n')' = f on (0,1) with
// u_n(0) = u_n(1) = 0 and periodic piecewise-constant a_n, solved exactly
// through u' = (c - F)/a, F(x) = int_0^x f.

#include <functional>
#include <string>
#include <vector>

#include "divcurl/error.hpp"
#include "divcurl/pairing.hpp"

namespace divcurl {

struct Phase {
  double theta;  ///< volume fraction inside one cell
  double value;  ///< coefficient value on that fraction
};

/// n periodic cells on (0,1); each cell lists its phases left to right.
struct LaminateCoefficient {
  int n = 1;
  std::vector<Phase> phases;
  double alpha = 0.0;  ///< coercivity constant a >= alpha > 0

  static LaminateCoefficient constant(double a);
  static LaminateCoefficient two_phase(int n, double a1, double a2, double theta = 0.5);
  /// Value n on a fraction 1/n of each cell, 1 elsewhere.
  static LaminateCoefficient stiff_inclusion(int n);

  /// Throws NonCoercive when a phase drops below alpha (or alpha <= 0).
  void validate() const;
  std::vector<double> breakpoints() const;
  std::vector<double> piece_values() const;  ///< one value per breakpoint interval
  double operator()(double x) const;
  double sup() const;
  /// (int_0^1 a^rho)^{1/rho}
  double l_rho_norm(double rho) const;
};

using Load = std::function<double(double)>;

class TwoPointSolution {
 public:
  double u(double x) const;
  double du(double x) const;
  /// a u' = c - F(x), continuous across coefficient jumps.
  double flux(double x) const;
  double load_antiderivative(double x) const;
  double energy() const;          ///< int a |u'|^2
  double load_work() const;       ///< int f u
  double gradient_l2_sq() const;  ///< int |u'|^2
  double boundary_residual() const { return std::max(std::abs(u(0.0)), std::abs(u(1.0))); }
  double c() const { return c_; }
  const std::vector<double>& breakpoints() const { return bps_; }
  const std::vector<double>& values() const { return vals_; }

  /// int_0^1 g over the solution's pieces with `order`-point Gauss.
  double integrate(const std::function<double(double)>& g, int order = 10) const;

 private:
  friend TwoPointSolution solve_two_point(const LaminateCoefficient&, const Load&, int);

  std::size_t piece(double x) const;
  double piece_integral(std::size_t k, double lo, double hi,
                        const std::function<double(double)>& g) const;

  std::vector<double> bps_;
  std::vector<double> vals_;
  std::vector<double> F_at_;  ///< F at breakpoints
  std::vector<double> u_at_;  ///< u at breakpoints
  Load f_;
  double c_ = 0.0;
  int order_ = 10;
};

/// `order` is the Gauss order used per coefficient piece for the antiderivatives.
TwoPointSolution solve_two_point(const LaminateCoefficient& a, const Load& f, int order = 10);

/// Harmonic mean over one cell.
double effective_coefficient(const LaminateCoefficient& a);

struct HLimitReport {
  double a_star = 0;
  std::vector<PairingTable> flux;       ///< <a_n u_n', psi> per test function
  std::vector<double> flux_limit;       ///< <a* u', psi>
  std::vector<PairingTable> energy;     ///< <a_n |u_n'|^2, psi>
  std::vector<double> energy_limit;     ///< <a* |u'|^2, psi>
  PairingTable l2_error;                ///< ||u_n - u||_{L^2}
  PairingTable gradient_l2_error;       ///< ||u_n' - u'||_{L^2}
  PairingTable total_energy;            ///< F_n(u_n) = int a_n |u_n'|^2
  double total_energy_limit = 0;        ///< int a* |u'|^2
  double max_energy_identity_error = 0;  ///< max |int a|u'|^2 - int f u|
  bool coercivity_holds = true;
  double max_boundary_residual = 0;
  double sup_coefficient = 0;            ///< sup_n sup a_n
  /// max over psi of |flux(n_last) - limit| / |limit|
  double final_flux_rel_error = 0;
};

/// Solves every ladder member and the homogenized problem with a_star.
HLimitReport flux_convergence_test(const std::vector<LaminateCoefficient>& ladder, double a_star,
                                   const Load& f, const std::vector<Load>& tests);

struct BoundTrack {
  double rho = 1;
  PairingTable norms;  ///< ||a_n||_{L^rho}
  double log_slope = 0;
  bool bounded = false;
};

BoundTrack coefficient_bound_track(const std::vector<LaminateCoefficient>& ladder, double rho);

}  // namespace divcurl
