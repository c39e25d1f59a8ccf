#pragma once

// Exact step-function machinery: distribution functions, non-increasing
// rearrangements, Lorentz L^{p,1} norms and equi-integrability moduli.
// Every quantity here is a finite sum over step levels; no quadrature.

#include <span>
#include <vector>

#include "divcurl/error.hpp"

namespace divcurl {

/// Discrete representative of a measurable |f|: one value per cell with the
/// cell's measure as weight.
class WeightedSamples {
 public:
  WeightedSamples() = default;
  WeightedSamples(std::vector<double> values, std::vector<double> weights);

  /// Appends |value| with the given cell measure (must be > 0).
  void add(double value, double weight);
  void append(const WeightedSamples& other);

  std::span<const double> values() const noexcept { return values_; }
  std::span<const double> weights() const noexcept { return weights_; }
  std::size_t size() const noexcept { return values_.size(); }
  bool empty() const noexcept { return values_.empty(); }
  double total_measure() const noexcept { return total_; }

  WeightedSamples scaled(double c) const;

 private:
  std::vector<double> values_;
  std::vector<double> weights_;
  double total_ = 0.0;
};

/// Piecewise-constant function, right-continuous: levels[i] on
/// [breakpoints[i], breakpoints[i+1]), zero outside.
class StepFunction {
 public:
  StepFunction() = default;
  StepFunction(std::vector<double> breakpoints, std::vector<double> levels);

  double operator()(double t) const;
  const std::vector<double>& breakpoints() const noexcept { return breakpoints_; }
  const std::vector<double>& levels() const noexcept { return levels_; }
  std::size_t pieces() const noexcept { return levels_.size(); }
  bool empty() const noexcept { return levels_.empty(); }

  /// Lower end of the support interval (0 when empty).
  double lo() const noexcept { return breakpoints_.empty() ? 0.0 : breakpoints_.front(); }
  double hi() const noexcept { return breakpoints_.empty() ? 0.0 : breakpoints_.back(); }

  /// Cells of the step function as weighted samples of |levels|.
  WeightedSamples to_samples() const;

  bool operator==(const StepFunction&) const = default;

 private:
  std::vector<double> breakpoints_;
  std::vector<double> levels_;
};

/// lambda -> |{|f| > lambda}|, exact.
StepFunction distribution_function(const WeightedSamples& s);

/// Distribution function of a step function viewed as a function of t.
/// Non-increasing step functions starting at 0 (rearrangements) are read off
/// their breakpoints directly, so equimeasurability compares bit-for-bit.
StepFunction distribution_function(const StepFunction& f);

/// Non-increasing rearrangement f* on [0, total_measure).
StepFunction rearrangement(const WeightedSamples& s);

/// int_0^inf d(lambda)^{1/p} dlambda as an exact level sum; p > 1.
double lorentz_norm(const WeightedSamples& s, double p);

/// int_0^inf t^{-1/p'} f*(t) dt, integrated exactly against the step f*.
double lorentz_norm_from_rearrangement(const WeightedSamples& s, double p);

double l1_norm(const WeightedSamples& s);

/// ||f||_{L^{N-1,1}}; for N = 2 this is the L^1 norm (L^{1,1} = L^1).
double lorentz_norm_dim(const WeightedSamples& s, int dim);

struct ModulusMode {
  enum class Kind { L1, Lorentz };
  Kind kind = Kind::L1;
  double p = 1.0;

  static ModulusMode l1() { return {Kind::L1, 1.0}; }
  static ModulusMode lorentz(double p) { return {Kind::Lorentz, p}; }
};

/// sup over |E| <= delta of the norm of f restricted to E. The supremum is
/// attained on a super-level set of measure delta, so this is
///   L1:          int_0^delta f*(t) dt,
///   Lorentz(p):  int_0^inf min(d(lambda), delta)^{1/p} dlambda.
double equiintegrability_modulus(const WeightedSamples& s, double delta, ModulusMode mode);

}  // namespace divcurl
