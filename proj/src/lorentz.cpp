#include "divcurl/lorentz.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace divcurl {

namespace {

// Distinct positive values in decreasing order with cumulative measures:
// cumulative[j] = |{|f| >= values[j]}|.
struct Levels {
  std::vector<double> values;
  std::vector<double> cumulative;
};

Levels sorted_levels(const WeightedSamples& s) {
  std::vector<std::size_t> order(s.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  const auto v = s.values();
  const auto w = s.weights();
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return v[a] > v[b]; });
  Levels out;
  double running = 0.0;
  std::size_t i = 0;
  while (i < order.size() && v[order[i]] > 0.0) {
    const double level = v[order[i]];
    double group = 0.0;
    while (i < order.size() && v[order[i]] == level) group += w[order[i++]];
    running += group;
    out.values.push_back(level);
    out.cumulative.push_back(running);
  }
  return out;
}

void require_exponent(double p) {
  if (!(p > 1.0) || !std::isfinite(p)) {
    throw Error(ErrorCode::InvalidExponent, "Lorentz exponent must satisfy p > 1");
  }
}

}  // namespace

WeightedSamples::WeightedSamples(std::vector<double> values, std::vector<double> weights) {
  if (values.size() != weights.size()) {
    throw Error(ErrorCode::InvalidConfig, "values and weights differ in length");
  }
  values_.reserve(values.size());
  weights_.reserve(weights.size());
  for (std::size_t i = 0; i < values.size(); ++i) add(values[i], weights[i]);
}

void WeightedSamples::add(double value, double weight) {
  if (!(weight > 0.0) || !std::isfinite(weight)) {
    throw Error(ErrorCode::InvalidConfig, "sample weights must be positive and finite");
  }
  if (!std::isfinite(value)) throw Error(ErrorCode::InvalidConfig, "sample values must be finite");
  values_.push_back(std::abs(value));
  weights_.push_back(weight);
  total_ += weight;
}

void WeightedSamples::append(const WeightedSamples& other) {
  for (std::size_t i = 0; i < other.size(); ++i) add(other.values_[i], other.weights_[i]);
}

WeightedSamples WeightedSamples::scaled(double c) const {
  WeightedSamples out = *this;
  for (double& v : out.values_) v *= std::abs(c);
  return out;
}

StepFunction::StepFunction(std::vector<double> breakpoints, std::vector<double> levels)
    : breakpoints_(std::move(breakpoints)), levels_(std::move(levels)) {
  if (levels_.empty() && breakpoints_.empty()) return;
  if (breakpoints_.size() != levels_.size() + 1) {
    throw Error(ErrorCode::InconsistentGrid, "step function needs pieces + 1 breakpoints");
  }
  for (std::size_t i = 0; i + 1 < breakpoints_.size(); ++i) {
    if (!(breakpoints_[i] < breakpoints_[i + 1])) {
      throw Error(ErrorCode::InconsistentGrid, "breakpoints must increase strictly");
    }
  }
}

double StepFunction::operator()(double t) const {
  if (levels_.empty() || t < breakpoints_.front() || t >= breakpoints_.back()) return 0.0;
  const auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), t);
  return levels_[static_cast<std::size_t>(it - breakpoints_.begin()) - 1];
}

WeightedSamples StepFunction::to_samples() const {
  WeightedSamples s;
  for (std::size_t i = 0; i < levels_.size(); ++i) {
    s.add(levels_[i], breakpoints_[i + 1] - breakpoints_[i]);
  }
  return s;
}

StepFunction distribution_function(const WeightedSamples& s) {
  const Levels lv = sorted_levels(s);
  if (lv.values.empty()) return {};
  const std::size_t m = lv.values.size();
  std::vector<double> bps;
  std::vector<double> levels;
  bps.reserve(m + 1);
  levels.reserve(m);
  bps.push_back(0.0);
  // On [v_{j+1}, v_j) the super-level set is the first j+1 groups.
  for (std::size_t j = m; j-- > 0;) {
    bps.push_back(lv.values[j]);
    levels.push_back(lv.cumulative[j]);
  }
  return StepFunction(std::move(bps), std::move(levels));
}

StepFunction distribution_function(const StepFunction& f) {
  const auto& lv = f.levels();
  const auto& bp = f.breakpoints();
  bool rearranged = !lv.empty() && bp.front() == 0.0 && lv.front() >= 0.0;
  for (std::size_t i = 1; rearranged && i < lv.size(); ++i) {
    rearranged = lv[i] < lv[i - 1] && lv[i] >= 0.0;
  }
  if (!rearranged) return distribution_function(f.to_samples());

  std::size_t m = lv.size();
  while (m > 0 && lv[m - 1] == 0.0) --m;
  if (m == 0) return {};
  std::vector<double> bps{0.0};
  std::vector<double> levels;
  for (std::size_t j = m; j-- > 0;) {
    bps.push_back(lv[j]);
    levels.push_back(bp[j + 1]);
  }
  return StepFunction(std::move(bps), std::move(levels));
}

StepFunction rearrangement(const WeightedSamples& s) {
  const Levels lv = sorted_levels(s);
  std::vector<double> bps{0.0};
  std::vector<double> levels;
  for (std::size_t j = 0; j < lv.values.size(); ++j) {
    bps.push_back(lv.cumulative[j]);
    levels.push_back(lv.values[j]);
  }
  const double tail = s.total_measure() - (lv.cumulative.empty() ? 0.0 : lv.cumulative.back());
  if (tail > 0.0 && s.total_measure() > bps.back()) {
    bps.push_back(s.total_measure());
    levels.push_back(0.0);
  }
  if (levels.empty()) return {};
  return StepFunction(std::move(bps), std::move(levels));
}

double lorentz_norm(const WeightedSamples& s, double p) {
  require_exponent(p);
  const Levels lv = sorted_levels(s);
  double sum = 0.0;
  for (std::size_t j = 0; j < lv.values.size(); ++j) {
    const double below = j + 1 < lv.values.size() ? lv.values[j + 1] : 0.0;
    sum += (lv.values[j] - below) * std::pow(lv.cumulative[j], 1.0 / p);
  }
  return sum;
}

double lorentz_norm_from_rearrangement(const WeightedSamples& s, double p) {
  require_exponent(p);
  const StepFunction fstar = rearrangement(s);
  const auto& bp = fstar.breakpoints();
  const auto& lv = fstar.levels();
  double sum = 0.0;
  for (std::size_t i = 0; i < lv.size(); ++i) {
    // int_a^b t^{-1/p'} dt = p (b^{1/p} - a^{1/p})
    sum += lv[i] * p * (std::pow(bp[i + 1], 1.0 / p) - std::pow(bp[i], 1.0 / p));
  }
  return sum;
}

double l1_norm(const WeightedSamples& s) {
  double sum = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) sum += s.values()[i] * s.weights()[i];
  return sum;
}

double lorentz_norm_dim(const WeightedSamples& s, int dim) {
  if (dim == 2) return l1_norm(s);
  return lorentz_norm(s, dim - 1.0);
}

double equiintegrability_modulus(const WeightedSamples& s, double delta, ModulusMode mode) {
  const double total = s.total_measure();
  if (!(delta > 0.0) || delta > total * (1.0 + 1e-12)) {
    throw Error(ErrorCode::InvalidDelta, "delta must lie in (0, total measure]");
  }
  if (mode.kind == ModulusMode::Kind::Lorentz) require_exponent(mode.p);
  const Levels lv = sorted_levels(s);
  double sum = 0.0;
  double prev = 0.0;
  for (std::size_t j = 0; j < lv.values.size(); ++j) {
    if (mode.kind == ModulusMode::Kind::L1) {
      const double hi = std::min(lv.cumulative[j], delta);
      sum += lv.values[j] * (hi - std::min(prev, delta));
      prev = lv.cumulative[j];
    } else {
      const double below = j + 1 < lv.values.size() ? lv.values[j + 1] : 0.0;
      sum += (lv.values[j] - below) * std::pow(std::min(lv.cumulative[j], delta), 1.0 / mode.p);
    }
  }
  return sum;
}

}  // namespace divcurl
