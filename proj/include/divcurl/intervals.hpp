#pragma once

#include <algorithm>
#include <utility>
#include <vector>

namespace divcurl {

/// Finite union of closed intervals, kept sorted with touching pieces merged.
class IntervalSet {
 public:
  using Interval = std::pair<double, double>;

  IntervalSet() = default;
  explicit IntervalSet(std::vector<Interval> pieces) {
    for (const auto& [a, b] : pieces) add(a, b);
  }
  static IntervalSet single(double a, double b) { return IntervalSet({{a, b}}); }

  void add(double a, double b) {
    if (!(a < b)) return;
    pieces_.emplace_back(a, b);
    std::sort(pieces_.begin(), pieces_.end());
    std::vector<Interval> merged;
    for (const auto& p : pieces_) {
      if (!merged.empty() && p.first <= merged.back().second) {
        merged.back().second = std::max(merged.back().second, p.second);
      } else {
        merged.push_back(p);
      }
    }
    pieces_ = std::move(merged);
  }

  const std::vector<Interval>& pieces() const noexcept { return pieces_; }
  bool empty() const noexcept { return pieces_.empty(); }

  double measure() const {
    double m = 0.0;
    for (const auto& [a, b] : pieces_) m += b - a;
    return m;
  }

  bool contains(double t) const {
    return std::any_of(pieces_.begin(), pieces_.end(),
                       [t](const Interval& p) { return p.first <= t && t <= p.second; });
  }

  /// Measure of the intersection with [a, b].
  double overlap(double a, double b) const {
    double m = 0.0;
    for (const auto& [lo, hi] : pieces_) m += std::max(0.0, std::min(hi, b) - std::max(lo, a));
    return m;
  }

  bool subset_of(const IntervalSet& other, double tol = 1e-12) const {
    return std::all_of(pieces_.begin(), pieces_.end(), [&](const Interval& p) {
      return other.overlap(p.first, p.second) >= (p.second - p.first) - tol;
    });
  }

  double lo() const { return pieces_.empty() ? 0.0 : pieces_.front().first; }
  double hi() const { return pieces_.empty() ? 0.0 : pieces_.back().second; }

 private:
  std::vector<Interval> pieces_;
};

}  // namespace divcurl
