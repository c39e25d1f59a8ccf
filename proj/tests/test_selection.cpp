#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <numbers>

#include "divcurl/selection.hpp"
#include "divcurl/sequences.hpp"

using namespace divcurl;
using std::numbers::pi;

namespace {

Point pt(std::initializer_list<double> v) {
  Point p(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) p[i++] = x;
  return p;
}

/// Scalar potential x -> c + x_1 as a one-component map (|Du| = 1).
VectorField linear_potential(int dim, double shift = 0.0) {
  return VectorField(
      Domain::whole(dim), 1, [shift](const Point& x) -> Values { return Values::Constant(1, x[0] + shift); },
      [dim](const Point&) -> Matrix {
        Matrix j = Matrix::Zero(1, dim);
        j(0, 0) = 1.0;
        return j;
      });
}

VectorField zero_map(int dim) {
  return VectorField(Domain::whole(dim), 1, [](const Point&) -> Values { return Values::Zero(1); },
                     [dim](const Point&) -> Matrix { return Matrix::Zero(1, dim); });
}

VectorField potential_map(const ScalarField& phi) {
  const int dim = phi.dim();
  return VectorField(
      phi.domain(), 1, [phi](const Point& x) -> Values { return Values::Constant(1, phi(x)); },
      [phi, dim](const Point& x) -> Matrix {
        Matrix j(1, dim);
        j.row(0) = phi.gradient(x).transpose();
        return j;
      });
}

SelectionConfig lq_config(double q, double lambda, double r0, double r1) {
  SelectionConfig c;
  c.q = q;
  c.lambda = lambda;
  c.base = IntervalSet::single(r0, r1);
  return c;
}

}  // namespace

TEST_CASE("profile of a unit-gradient pair is 8 pi") {
  const VectorField u = linear_potential(3);
  const SelectionConfig cfg = lq_config(2.0, 30.0, 0.25, 0.75);
  const GradientProfile prof =
      gradient_sphere_profile(u, u, cfg, pt({0, 0, 0}), RadialGrid::uniform(0.25, 0.75, 10, 4), sphere_quadrature(3, 8));
  for (double v : prof.profile.levels()) CHECK(v == doctest::Approx(8 * pi).epsilon(1e-13));

  const SelectionResult keep = select_good_radii(prof, cfg);
  CHECK(keep.measure_removed == 0.0);
  CHECK(keep.selected.measure() == doctest::Approx(0.5));
  CHECK(keep.bound_holds);

  SelectionConfig strict = cfg;
  strict.lambda = 1.0;
  const SelectionResult none = select_good_radii(prof, strict);
  CHECK(none.selected.empty());
  CHECK(none.measure_removed == doctest::Approx(0.5));
  CHECK(none.bound_rhs >= 0.5);
  CHECK(none.bound_holds);
}

TEST_CASE("zero fields give a zero profile") {
  const VectorField z = zero_map(3);
  const GradientProfile prof = gradient_sphere_profile(z, z, lq_config(2, 1, 0.25, 0.75), pt({0, 0, 0}),
                                                       RadialGrid::uniform(0.25, 0.75, 5, 4), sphere_quadrature(3, 6));
  for (double v : prof.profile.levels()) CHECK(v == 0.0);
}

TEST_CASE("N = 2 counterexample profile against an adaptive angular oracle") {
  using boost::math::quadrature::gauss_kronrod;
  const int n = 16;
  const ScalarField phi = counterexample_fields(2, 1.0, n).potential;
  const VectorField un = potential_map(phi);
  const Point x0 = pt({0, 0.5});
  const RadialGrid grid = RadialGrid::uniform(0.25, 0.75, 10, 4);
  const GradientProfile prof =
      gradient_sphere_profile(un, zero_map(2), lq_config(1, 1, 0.25, 0.75), x0, grid, sphere_quadrature(2, 512));
  for (std::size_t i = 0; i < prof.midpoints.size(); ++i) {
    const double r = prof.midpoints[i];
    auto g = [&](double t) {
      const Point x = x0 + r * pt({std::cos(t), std::sin(t)});
      const double s = 1 - std::abs(x[0]);
      return std::hypot(n * std::pow(s, n - 1) * x[1], std::pow(s, n));
    };
    // The integrand has kinks where x_1 = 0 (t = +-pi/2).
    double oracle = 0;
    const double cuts[] = {-pi, -pi / 2, pi / 2, pi};
    for (int k = 0; k < 3; ++k) oracle += gauss_kronrod<double, 61>::integrate(g, cuts[k], cuts[k + 1], 15, 1e-13);
    CHECK(prof.profile(r) == doctest::Approx(oracle).epsilon(0.01));
  }
}

TEST_CASE("selection on the counterexample at the median threshold") {
  const VectorField un = potential_map(counterexample_fields(3, 1.0, 64).potential);
  SelectionConfig cfg = lq_config(2, 1, 0.25, 0.75);
  const GradientProfile prof = gradient_sphere_profile(un, zero_map(3), cfg, pt({0, 0, 0.5}),
                                                       RadialGrid::uniform(0.25, 0.75, 20, 8), sphere_quadrature(3, 32));
  std::vector<double> lv = prof.profile.levels();
  std::nth_element(lv.begin(), lv.begin() + lv.size() / 2, lv.end());
  cfg.lambda = lv[lv.size() / 2];
  const SelectionResult res = select_good_radii(prof, cfg);
  CHECK(res.measure_removed <= res.bound_rhs);
  CHECK(res.chain_middle >= res.measure_removed * (1 - 1e-12));
  CHECK(res.bound_holds);
  CHECK(res.selected.subset_of(cfg.base));
  for (double r : res.selected_radii) CHECK(prof.profile(r) <= cfg.lambda);
}

TEST_CASE("selection rejects a base set that splits panels") {
  const VectorField u = linear_potential(3);
  const GradientProfile prof = gradient_sphere_profile(u, u, lq_config(2, 1, 0.25, 0.75), pt({0, 0, 0}),
                                                       RadialGrid::uniform(0.25, 0.75, 4, 4), sphere_quadrature(3, 6));
  SelectionConfig bad = lq_config(2, 1, 0.3, 0.75);
  try {
    select_good_radii(prof, bad);
    FAIL("expected InconsistentGrid");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InconsistentGrid);
  }
}

TEST_CASE("trace convergence") {
  const VectorField u = linear_potential(3);
  const VectorField shifted = linear_potential(3, 0.3);
  const SelectionConfig cfg = lq_config(2.0, 100.0, 0.25, 0.75);
  const Point x0 = pt({0, 0, 0});
  const SphereQuad quad = sphere_quadrature(3, 8);
  const GradientProfile prof = gradient_sphere_profile(u, u, cfg, x0, RadialGrid::uniform(0.25, 0.75, 5, 4), quad);
  const SelectionResult res = select_good_radii(prof, cfg);
  CHECK(trace_convergence_sup(u, u, res, TraceNorm::ls(2.0), x0, quad, cfg) == 0.0);
  CHECK(trace_convergence_sup(shifted, u, res, TraceNorm::ls(2.0), x0, quad, cfg) ==
        doctest::Approx(0.3 * std::sqrt(4 * pi)).epsilon(1e-12));

  SelectionConfig low = cfg;
  low.q = 1.5;  // q* = 2q/(2-q) = 6 on S_2
  CHECK(sphere_sobolev_exponent(1.5, 3) == doctest::Approx(6.0));
  CHECK_NOTHROW(trace_convergence_sup(u, u, res, TraceNorm::ls(5.0), x0, quad, low));
  CHECK_THROWS_AS(trace_convergence_sup(u, u, res, TraceNorm::ls(7.0), x0, quad, low), Error);
  CHECK_THROWS_AS(trace_convergence_sup(u, u, res, TraceNorm::c0(), x0, quad, cfg), Error);
  CHECK_THROWS_AS(trace_convergence_sup(u, u, res, TraceNorm::x1(), x0, quad, cfg), Error);
  SelectionConfig lor = cfg;
  lor.norm_kind = NormKind::LorentzNMinus1;
  CHECK(trace_convergence_sup(u, u, res, TraceNorm::x1(), x0, quad, lor) == 0.0);
}

TEST_CASE("trace sup decreases along the counterexample ladder") {
  const SelectionConfig cfg = lq_config(2.0, 1e6, 0.25, 0.75);
  const Point x0 = pt({0, 0, 0.5});
  const SphereQuad quad = sphere_quadrature(3, 32);
  double prev = 1e300;
  for (int n : {8, 16, 32, 64}) {
    const VectorField un = potential_map(counterexample_fields(3, 1.0, n).potential);
    const GradientProfile prof =
        gradient_sphere_profile(un, zero_map(3), cfg, x0, RadialGrid::uniform(0.25, 0.75, 10, 4), quad);
    const SelectionResult res = select_good_radii(prof, cfg);
    const double t = trace_convergence_sup(un, zero_map(3), res, TraceNorm::ls(2.0), x0, quad, cfg);
    CHECK(t < prev);
    prev = t;
  }
}

TEST_CASE("cap-maximal profiles") {
  const SphereQuad quad = sphere_quadrature(3, 32);
  const RadialGrid grid = RadialGrid::uniform(0.25, 0.75, 4, 2);
  const Point o = pt({0, 0, 0});
  const ScalarField one(Domain::whole(3), [](const Point&) { return 1.0; });
  const CapMaximalProfile t1 = cap_maximal_profile(one, 0.7, o, grid, quad, NormKind::Lq);
  for (double v : t1.values) CHECK(std::abs(v - cap_area(0.7, 3)) <= 2 * quad.equator_spacing());

  const ScalarField zero(Domain::whole(3), [](const Point&) { return 0.0; });
  for (double v : cap_maximal_profile(zero, 0.7, o, grid, quad, NormKind::Lq).values) CHECK(v == 0.0);

  // Pole-concentrated density: axisymmetric oracle 2 pi int_{1-h^2/2}^1 (1+t)^m dt.
  const int m = 8;
  const double h = 0.5;
  const ScalarField pole(Domain::whole(3), [m](const Point& x) { return std::pow(1 + x[2] / x.norm(), m); });
  const CapMaximalProfile tp = cap_maximal_profile(pole, h, o, grid, quad, NormKind::Lq);
  const double oracle = 2 * pi * (std::pow(2.0, m + 1) - std::pow(2 - h * h / 2, m + 1)) / (m + 1);
  for (std::size_t i = 0; i < tp.values.size(); ++i) {
    CHECK(tp.values[i] == doctest::Approx(oracle).epsilon(0.02));
    CHECK(quad.node(tp.argmax[i])[2] > 0.99);
  }
  CHECK_THROWS_AS(cap_maximal_profile(one, 0.0, o, grid, quad, NormKind::Lq), Error);
  CHECK_THROWS_AS(cap_maximal_profile(one, 2.1, o, grid, quad, NormKind::Lq), Error);
}

TEST_CASE("exceptional sets") {
  const SphereQuad quad = sphere_quadrature(3, 8);
  const RadialGrid grid = RadialGrid::uniform(0.25, 0.75, 4, 2);
  const Point o = pt({0, 0, 0});
  const ScalarField zero(Domain::whole(3), [](const Point&) { return 0.0; });
  const ExceptionalSet e0 = exceptional_set(cap_maximal_profile(zero, 0.5, o, grid, quad, NormKind::Lq), 1.0, 2, 0.25, 0.75);
  CHECK(e0.set.empty());
  CHECK(e0.measure == 0.0);
  const ScalarField big(Domain::whole(3), [](const Point&) { return 10.0; });
  const ExceptionalSet e1 = exceptional_set(cap_maximal_profile(big, 0.5, o, grid, quad, NormKind::Lq), 1.0, 2, 0.25, 0.75);
  CHECK(e1.threshold == doctest::Approx(0.25));
  CHECK(e1.measure == doctest::Approx(0.5));
}

TEST_CASE("delta and cap radius helpers") {
  const std::vector<WeightedSamples> fam = {WeightedSamples({1.0, 3.0}, {0.5, 0.5})};
  const double d = equiintegrability_delta(fam, 1.0, 1, ModulusMode::l1());
  CHECK(equiintegrability_modulus(fam[0], d, ModulusMode::l1()) <= 0.25);
  CHECK(d > 0.0);
  const double h = cap_radius_for_delta(0.01, 3, 0.25, 0.75);
  CHECK(cap_area(h, 3) * (std::pow(0.75, 3) - std::pow(0.25, 3)) / 3 < 0.01);
  CHECK(h > 0.0);
  CHECK(h <= 2.0);
}
