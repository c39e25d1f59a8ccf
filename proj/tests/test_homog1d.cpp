#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>

#include "divcurl/experiments.hpp"
#include "divcurl/homog1d.hpp"

using namespace divcurl;

namespace {

const Load unit_load = [](double) { return 1.0; };

/// Independent piecewise assembly: u(x) = int_0^x (c - t)/a(t) dt with c
/// fixed by u(1) = 0, integrated adaptively cell by cell.
struct PiecewiseOracle {
  std::vector<double> bps;
  std::vector<double> vals;
  double c = 0;

  explicit PiecewiseOracle(const LaminateCoefficient& a) : bps(a.breakpoints()), vals(a.piece_values()) {
    double s_inv = 0, s_t = 0;
    for (std::size_t i = 0; i < vals.size(); ++i) {
      s_inv += (bps[i + 1] - bps[i]) / vals[i];
      s_t += (bps[i + 1] * bps[i + 1] - bps[i] * bps[i]) / (2 * vals[i]);
    }
    c = s_t / s_inv;
  }

  double u(double x) const {
    using boost::math::quadrature::gauss_kronrod;
    double s = 0;
    for (std::size_t i = 0; i < vals.size() && bps[i] < x; ++i) {
      const double hi = std::min(x, bps[i + 1]);
      const double v = vals[i];
      s += gauss_kronrod<double, 15>::integrate([this, v](double t) { return (c - t) / v; }, bps[i], hi, 0, 1e-15);
    }
    return s;
  }
};

}  // namespace

TEST_CASE("constant coefficient solutions") {
  const TwoPointSolution s1 = solve_two_point(LaminateCoefficient::constant(1.0), unit_load);
  for (double x : {0.1, 0.37, 0.5, 0.9}) {
    CHECK(s1.u(x) == doctest::Approx(x * (1 - x) / 2).epsilon(1e-13));
    CHECK(s1.flux(x) == doctest::Approx(0.5 - x).epsilon(1e-13));
  }
  const TwoPointSolution s2 = solve_two_point(LaminateCoefficient::constant(2.0), unit_load);
  for (double x : {0.1, 0.37, 0.9}) {
    CHECK(s2.u(x) == doctest::Approx(s1.u(x) / 2).epsilon(1e-13));
    CHECK(s2.flux(x) == doctest::Approx(s1.flux(x)).epsilon(1e-13));
  }
  CHECK(s1.boundary_residual() < 1e-12);
}

TEST_CASE("two-phase laminate against a piecewise oracle") {
  const LaminateCoefficient a = LaminateCoefficient::two_phase(8, 1.0, 4.0);
  const TwoPointSolution s = solve_two_point(a, unit_load);
  const PiecewiseOracle o(a);
  CHECK(s.c() == doctest::Approx(o.c).epsilon(1e-12));
  for (int i = 1; i < 50; ++i) {
    const double x = i / 50.0 + 0.0013;
    CHECK(std::abs(s.u(x) - o.u(x)) < 1e-10);
  }
  // The flux is continuous across every coefficient jump.
  for (double b : a.breakpoints()) {
    if (b <= 0 || b >= 1) continue;
    CHECK(std::abs(s.flux(b - 1e-13) - s.flux(b + 1e-13)) < 1e-10);
  }
}

TEST_CASE("effective coefficients") {
  CHECK(effective_coefficient(LaminateCoefficient::two_phase(4, 1.0, 4.0)) == doctest::Approx(1.6).epsilon(1e-15));
  CHECK(effective_coefficient(LaminateCoefficient::constant(3.0)) == doctest::Approx(3.0));
  for (int n : {2, 8, 64}) {
    CHECK(effective_coefficient(LaminateCoefficient::stiff_inclusion(n)) ==
          doctest::Approx(1.0 / (1 - 1.0 / n + 1.0 / (double(n) * n))).epsilon(1e-13));
  }
}

TEST_CASE("coercivity is enforced") {
  LaminateCoefficient a = LaminateCoefficient::two_phase(4, 1.0, 4.0);
  a.alpha = 2.0;
  try {
    a.validate();
    FAIL("expected NonCoercive");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NonCoercive);
  }
  CHECK_THROWS_AS(solve_two_point(a, unit_load), Error);
}

TEST_CASE("flux convergence on the laminate and the stiff family") {
  const auto ladder = doubling_ladder(8, 512);
  std::vector<LaminateCoefficient> lam, stiff, flat;
  for (int n : ladder) {
    lam.push_back(LaminateCoefficient::two_phase(n, 1.0, 4.0));
    stiff.push_back(LaminateCoefficient::stiff_inclusion(n));
    flat.push_back(LaminateCoefficient::constant(2.0));
    flat.back().n = n;
  }
  const std::vector<Load> tests = {[](double x) { return x * x * (1 - x); }, [](double x) { return x * std::sin(3 * x); }};
  const HLimitReport hl = flux_convergence_test(lam, 1.6, unit_load, tests);
  for (std::size_t t = 0; t < tests.size(); ++t) {
    CHECK(limit_extrapolate(hl.flux[t]).value == doctest::Approx(hl.flux_limit[t]).epsilon(0.01));
    // Errors decrease along the ladder from n = 32 on.
    for (std::size_t i = 3; i < ladder.size(); ++i) {
      CHECK(std::abs(hl.flux[t].values[i] - hl.flux_limit[t]) < std::abs(hl.flux[t].values[i - 1] - hl.flux_limit[t]));
    }
  }
  CHECK(hl.max_energy_identity_error < 1e-10);
  CHECK(hl.coercivity_holds);
  CHECK(hl.l2_error.values.back() < 0.1 * hl.l2_error.values.front());
  CHECK(hl.gradient_l2_error.values.back() > 0.5 * hl.gradient_l2_error.values.front());

  const HLimitReport hs = flux_convergence_test(stiff, 1.0, unit_load, tests);
  CHECK(hs.final_flux_rel_error < 0.02);
  CHECK(hs.sup_coefficient == 512.0);

  const HLimitReport hc = flux_convergence_test(flat, 2.0, unit_load, tests);
  for (std::size_t t = 0; t < tests.size(); ++t) {
    for (double v : hc.flux[t].values) CHECK(v == doctest::Approx(hc.flux_limit[t]).epsilon(1e-12));
  }
}

TEST_CASE("coefficient bound tracks") {
  std::vector<LaminateCoefficient> stiff;
  for (int n : doubling_ladder(8, 512)) stiff.push_back(LaminateCoefficient::stiff_inclusion(n));
  const BoundTrack b1 = coefficient_bound_track(stiff, 1.0);
  CHECK(b1.bounded);
  for (std::size_t i = 0; i < stiff.size(); ++i) {
    const double n = stiff[i].n;
    CHECK(b1.norms.values[i] == doctest::Approx(2 - 1 / n).epsilon(1e-13));
  }
  const BoundTrack b2 = coefficient_bound_track(stiff, 2.0);
  CHECK_FALSE(b2.bounded);
  for (std::size_t i = 0; i < stiff.size(); ++i) {
    const double n = stiff[i].n;
    // int a_n^2 = (1 - 1/n) + n^2 / n = n + 1 - 1/n.
    CHECK(b2.norms.values[i] * b2.norms.values[i] == doctest::Approx(n + 1 - 1 / n).epsilon(1e-12));
  }
  std::vector<LaminateCoefficient> flat(5, LaminateCoefficient::constant(3.0));
  for (std::size_t i = 0; i < flat.size(); ++i) flat[i].n = 8 << i;
  const BoundTrack bc = coefficient_bound_track(flat, 2.0);
  for (double v : bc.norms.values) CHECK(v == doctest::Approx(3.0));
}
