#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <numbers>

#include "divcurl/experiments.hpp"
#include "divcurl/pairing.hpp"
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

PairingTable table_of(const std::function<double(int)>& v, int first, int last) {
  PairingTable t;
  for (int n = first; n <= last; n *= 2) t.push(n, v(n));
  return t;
}

std::vector<TestFunction> standard_tests() {
  std::vector<TestFunction> out;
  for (const auto& f : CylinderTestFunction::standard_family()) out.push_back(f.as_test());
  return out;
}

}  // namespace

TEST_CASE("pairing a constant against the cylinder test functions") {
  const Cubature cub = axis_graded_cubature(3);
  const ScalarField one(Domain::reference_cylinder(3), [](const Point&) { return 1.0; });
  const auto fam = CylinderTestFunction::standard_family();
  // int chi(|x'|) dx' = 2 pi int_0^1 (1-t^2)^2 t dt = pi / 3.
  CHECK(pair(one, fam[0].as_test(), cub) == doctest::Approx(pi / 3).epsilon(1e-12));
  CHECK(pair(one, fam[1].as_test(), cub) == doctest::Approx(pi / 6).epsilon(1e-12));
  CHECK(fam[2].g_integral() == doctest::Approx(4.0 / 3.0).epsilon(1e-14));
}

TEST_CASE("pairing against a bump: volume of its support weighted by the profile") {
  const RadialTestFunction b = RadialTestFunction::bump(pt({0, 0, 0.5}), 0.4, 1);
  const ScalarField one(Domain::reference_cylinder(3), [](const Point&) { return 1.0; });
  // int_B (1 - r^2/R^2) = 4 pi R^3 (1/3 - 1/5).
  CHECK(pair(one, b.as_test(), ball_cubature(b, 4, 8, 8)) ==
        doctest::Approx(4 * pi * std::pow(0.4, 3) * (1.0 / 3 - 1.0 / 5)).epsilon(1e-12));
}

TEST_CASE("antisymmetric integrand pairs to zero") {
  const Cubature cub = axis_graded_cubature(3);
  const ScalarField odd(Domain::reference_cylinder(3), [](const Point& x) { return std::sin(5 * (x[2] - 0.5)) * (1 + x[0] * x[0]); });
  const CylinderTestFunction sym{[](double t) { return 1 - t * t; }, [](double t) { return -2 * t; },
                                 [](double z) { return z * (1 - z); }, [](double z) { return 1 - 2 * z; }, "sym"};
  CHECK(std::abs(pair(odd, sym.as_test(), cub)) < 1e-10);
}

TEST_CASE("support violations are reported") {
  const RadialTestFunction b = RadialTestFunction::bump(pt({0, 0, 0.5}), 0.6, 2);
  const ScalarField one(Domain::reference_cylinder(3), [](const Point&) { return 1.0; });
  try {
    pair(one, b.as_test(), ball_cubature(b, 2, 4, 4));
    FAIL("expected SupportViolation");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SupportViolation);
  }
}

TEST_CASE("limit extrapolation examples") {
  const LimitEstimate a = limit_extrapolate(table_of([](int n) { return 1 + 3.0 / n; }, 8, 512));
  CHECK(a.value == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(a.rate == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(a.residual < 1e-12);
  const LimitEstimate c = limit_extrapolate(table_of([](int) { return 2.0; }, 8, 512));
  CHECK(c.value == 2.0);
  CHECK(c.rate == 0.0);
  CHECK(c.residual == 0.0);
  const LimitEstimate b = limit_extrapolate(table_of([](int n) { return n / (n + 1.0); }, 16, 4096));
  CHECK(std::abs(b.value - 1.0) < 1e-6);
  CHECK_THROWS_AS(limit_extrapolate(table_of([](int n) { return 1.0 / n; }, 8, 32)), Error);
}

TEST_CASE("pairing tables need increasing indices") {
  PairingTable t;
  t.push(8, 1.0);
  CHECK_THROWS(t.push(8, 2.0));
  CHECK_THROWS(t.push(4, 2.0));
}

TEST_CASE("div-curl concentration in three dimensions") {
  const Cubature cub = axis_graded_cubature(3, 32, 16, 16, 8);
  const auto fam = CylinderTestFunction::standard_family();
  std::vector<PairingTable> tables(fam.size());
  for (int n = 8; n <= 512; n *= 2) {
    const CounterexamplePair pr = counterexample_fields(3, 1.0, n);
    const ScalarField f(pr.sigma.domain(), [pr](const Point& x) { return pr.sigma(x).dot(pr.eta(x)); });
    for (std::size_t i = 0; i < fam.size(); ++i) tables[i].push(n, pair(f, fam[i].as_test(), cub));
  }
  const ConcentrationEstimate e = concentration_coefficient(tables, fam, true);
  CHECK(e.mean == doctest::Approx(pi / 2).epsilon(0.02));
  CHECK(e.relative_spread < 0.05);
  CHECK(e.detected);
  CHECK_FALSE(concentration_coefficient(tables, fam, false).detected);
}

TEST_CASE("div-curl concentration in two dimensions against a 1-D oracle") {
  using boost::math::quadrature::gauss_kronrod;
  const Cubature cub = axis_graded_cubature(2, 32, 16, 16, 8);
  const auto fam = CylinderTestFunction::standard_family();
  std::vector<PairingTable> tables(fam.size());
  PairingTable oracle;
  for (int n = 8; n <= 512; n *= 2) {
    const CounterexamplePair pr = counterexample_fields(2, 1.0, n);
    const ScalarField f(pr.sigma.domain(), [pr](const Point& x) { return pr.sigma(x).dot(pr.eta(x)); });
    for (std::size_t i = 0; i < fam.size(); ++i) tables[i].push(n, pair(f, fam[i].as_test(), cub));
    // Segment integral of n (1-|t|)^{2n} over (-1, 1), equal to 2n/(2n+1).
    const double seg = 2 * gauss_kronrod<double, 61>::integrate(
                               [n](double t) { return n * std::pow(1 - t, 2 * n); }, 0.0, 1.0, 25, 1e-14);
    CHECK(seg == doctest::Approx(2.0 * n / (2 * n + 1)).epsilon(1e-10));
    oracle.push(n, seg);
  }
  const double ref = limit_extrapolate(oracle).value;
  CHECK(ref == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(concentration_coefficient(tables, fam, true).mean == doctest::Approx(ref).epsilon(0.02));
}

TEST_CASE("degenerate concentration families") {
  const auto fam = CylinderTestFunction::standard_family();
  std::vector<PairingTable> one(1);
  for (int n = 8; n <= 64; n *= 2) one[0].push(n, 1.0);
  CHECK_THROWS_AS(concentration_coefficient(one, {fam[0]}, true), Error);
  CylinderTestFunction flat = fam[0];
  flat.chi = [](double t) { return t * (1 - t); };
  std::vector<PairingTable> two(2, one[0]);
  CHECK_THROWS_AS(concentration_coefficient(two, {fam[0], flat}, true), Error);
}

TEST_CASE("weak-null check on a constant field") {
  const Cubature cub = axis_graded_cubature(3, 16, 8, 8, 8);
  const VectorField c(Domain::reference_cylinder(3), 3, [](const Point&) -> Values { return Values::Constant(3, 0.5); });
  const WeakNullReport rep =
      weak_null_check(doubling_ladder(8, 64), [c](int) { return c; }, standard_tests(), cub, 2.0, 1e-3);
  CHECK_FALSE(rep.pass);
  CHECK(rep.max_abs_limit == doctest::Approx(0.5 * (4.0 / 3.0) * pi / 3).epsilon(1e-10));
  CHECK(rep.norms_bounded);
}

TEST_CASE("radial flux of solenoidal and radial fields") {
  const Point x0 = pt({0.1, 0, 0.5});
  const RadialGrid grid = RadialGrid::uniform(0, 0.45, 8, 16);
  const SphereQuad quad = sphere_quadrature(3, 64);
  for (int n : {8, 512}) {
    CHECK(radial_flux_profile(counterexample_fields(3, 1.0, n).sigma, x0, 0.45, grid, quad).max_abs() < 1e-8);
  }
  const VectorField id(Domain::whole(3), 3, [](const Point& x) -> Values { return x; });
  const RadialFluxProfile h = radial_flux_profile(id, pt({0, 0, 0}), 0.45, grid, quad);
  for (std::size_t i = 0; i < h.radii.size(); ++i) CHECK(std::abs(h.values[i] - 4 * pi * std::pow(h.radii[i], 3)) < 1e-8);
  CHECK_THROWS_AS(radial_flux_profile(counterexample_fields(3, 1.0, 8).sigma, pt({0.9, 0, 0.5}), 0.45, grid, quad), Error);
}

TEST_CASE("radial test functions and the restricted class") {
  const RadialTestFunction b = RadialTestFunction::bump(pt({0, 0}), 0.5, 3);
  CHECK(b.value(0.0) == 1.0);
  CHECK(b.value(0.6) == 0.0);
  CHECK(b.satisfies_restriction());
  RadialTestFunction r = b;
  r.derivative_support = IntervalSet::single(0.4, 0.5);
  CHECK_FALSE(r.satisfies_restriction());
  RadialTestFunction plateau{pt({0, 0}), 1.0,
                             [](double s) { return s < 0.5 ? 1.0 : 2 * (1 - s); },
                             [](double s) { return s < 0.5 ? 0.0 : -2.0; },
                             IntervalSet::single(0.5, 1.0)};
  CHECK(plateau.satisfies_restriction());
}

TEST_CASE("off-axis sup of a concentrating integrand") {
  double prev = 1e300;
  for (int n : {8, 64, 512}) {
    const CounterexamplePair pr = counterexample_fields(3, 1.0, n);
    const ScalarField f(pr.sigma.domain(), [pr](const Point& x) { return pr.sigma(x).dot(pr.eta(x)); });
    const double s = offaxis_sup(f, 1 / std::sqrt(double(n)));
    CHECK(s < prev);
    prev = s;
  }
  CHECK(prev < 1e-6);
}
