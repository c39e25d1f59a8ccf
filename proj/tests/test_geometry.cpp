#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/beta.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include "divcurl/geometry.hpp"

using namespace divcurl;
using std::numbers::pi;

namespace {

Point pt(std::initializer_list<double> v) {
  Point p(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) p[i++] = x;
  return p;
}

ScalarField constant(int dim, double c) {
  return ScalarField(Domain::whole(dim), [c](const Point&) { return c; });
}

}  // namespace

TEST_CASE("sphere quadrature weights sum to the sphere measure") {
  CHECK(sphere_quadrature(2, 64).weights.sum() == doctest::Approx(2 * pi).epsilon(1e-14));
  CHECK(sphere_quadrature(3, 16).weights.sum() == doctest::Approx(4 * pi).epsilon(1e-14));
  const SphereQuad q = sphere_quadrature(3, 16);
  for (Eigen::Index j = 0; j < q.size(); ++j) CHECK(std::abs(q.node(j).norm() - 1.0) < 1e-14);
}

TEST_CASE("second moment of y3 on the unit sphere") {
  const SphereQuad q = sphere_quadrature(3, 16);
  double s = 0;
  for (Eigen::Index j = 0; j < q.size(); ++j) s += q.weights[j] * q.nodes(2, j) * q.nodes(2, j);
  CHECK(std::abs(s - 4 * pi / 3) < 1e-10);
}

TEST_CASE("sphere quadrature rejects bad arguments") {
  CHECK_THROWS_AS(sphere_quadrature(4, 8), Error);
  try {
    sphere_quadrature(3, 1);
    FAIL("expected InvalidOrder");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidOrder);
  }
}

TEST_CASE("sphere integrals of radial profiles") {
  CHECK(sphere_integral(constant(3, 1.0), pt({0.1, 0.2, 0.3}), 0.7, sphere_quadrature(3, 8)) ==
        doctest::Approx(4 * pi).epsilon(1e-14));
  const Point x0 = pt({0.3, -0.2});
  const ScalarField sq(Domain::whole(2), [x0](const Point& x) { return (x - x0).squaredNorm(); });
  CHECK(sphere_integral(sq, x0, 2.0, sphere_quadrature(2, 32)) == doctest::Approx(8 * pi).epsilon(1e-13));
  const Point c3 = pt({0, 0, 0});
  const ScalarField quartic(Domain::whole(3), [c3](const Point& x) { return std::pow(1 - (x - c3).norm(), 4); });
  CHECK(sphere_integral(quartic, c3, 0.5, sphere_quadrature(3, 8)) == doctest::Approx(pi / 4).epsilon(1e-13));
}

TEST_CASE("sphere integral refuses spheres leaving the domain") {
  const ScalarField f(Domain::ball(pt({0, 0, 0}), 1.0), [](const Point&) { return 1.0; });
  try {
    sphere_integral(f, pt({0.5, 0, 0}), 0.6, sphere_quadrature(3, 8));
    FAIL("expected DomainViolation");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DomainViolation);
  }
}

TEST_CASE("annulus integrals") {
  const RadialGrid g = RadialGrid::uniform(0.0, 1.0, 4, 8);
  CHECK(std::abs(annulus_integral(constant(3, 1.0), pt({0, 0, 0}), 0.0, 1.0, g, sphere_quadrature(3, 8)) -
                 4 * pi / 3) < 1e-10);
  const RadialGrid g2 = RadialGrid::uniform(1.0, 2.0, 2, 4);
  CHECK(annulus_integral(constant(2, 1.0), pt({0, 0}), 1.0, 2.0, g2, sphere_quadrature(2, 16)) ==
        doctest::Approx(3 * pi).epsilon(1e-13));

  // (1 - |x|)^8 over the unit disc; oracle 2 pi B(2, 9).
  const ScalarField f(Domain::whole(2), [](const Point& x) { return std::pow(1 - x.norm(), 8); });
  const double oracle = 2 * pi * boost::math::beta(2.0, 9.0);
  CHECK(oracle == doctest::Approx(2 * pi / 90).epsilon(1e-14));
  const double v = annulus_integral(f, pt({0, 0}), 0.0, 1.0, RadialGrid::uniform(0, 1, 2, 8),
                                    sphere_quadrature(2, 16));
  CHECK(std::abs(v - oracle) < 1e-12);
}

TEST_CASE("annulus integral is additive across a split radius") {
  const ScalarField f(Domain::whole(3), [](const Point& x) { return std::exp(x[0]) * (1 + x[2] * x[2]); });
  const SphereQuad q = sphere_quadrature(3, 16);
  const Point o = pt({0, 0, 0});
  const double whole = annulus_integral(f, o, 0.2, 0.9, RadialGrid::from_breakpoints({0.2, 0.5, 0.9}, 12), q);
  const double a = annulus_integral(f, o, 0.2, 0.5, RadialGrid::uniform(0.2, 0.5, 1, 12), q);
  const double b = annulus_integral(f, o, 0.5, 0.9, RadialGrid::uniform(0.5, 0.9, 1, 12), q);
  CHECK(std::abs(whole - (a + b)) < 1e-12);
}

TEST_CASE("cap areas") {
  CHECK(cap_area(2.0, 2) == doctest::Approx(2 * pi).epsilon(1e-15));
  CHECK(cap_area(2.0, 3) == doctest::Approx(4 * pi).epsilon(1e-15));
  CHECK(std::abs(cap_area(1.0, 3) - pi) < 1e-12);
  CHECK_THROWS_AS(cap_area(0.0, 3), Error);
  CHECK_THROWS_AS(cap_area(2.5, 2), Error);

  // Indicator-quadrature cross-check at h = 1, N = 3.
  const SphereQuad q = sphere_quadrature(3, 64);
  const Point e1 = pt({1, 0, 0});
  double ind = 0;
  for (Eigen::Index j = 0; j < q.size(); ++j) {
    if ((q.node(j) - e1).norm() < 1.0) ind += q.weights[j];
  }
  CHECK(std::abs(ind - pi) <= 2 * q.equator_spacing());
}

TEST_CASE("N = 2 cap area against an adaptive arc-length oracle") {
  using boost::math::quadrature::gauss_kronrod;
  for (double h : {0.2, 0.9, 1.7}) {
    const double arc = gauss_kronrod<double, 61>::integrate(
        [h](double t) { return std::hypot(std::cos(t) - 1, std::sin(t)) < h ? 1.0 : 0.0; }, -pi, pi, 15, 1e-12);
    const double exact = 4 * std::asin(h / 2);
    CHECK(std::abs(cap_area(h, 2) - exact) < 1e-14);
    CHECK(std::abs(arc - exact) < 1e-3);  // oracle itself limited by the indicator jump
  }
}

TEST_CASE("sphere quadrature integrates low-degree monomials exactly") {
  for (int order : {6, 10}) {
    const SphereQuad q = sphere_quadrature(3, order);
    for (int a = 0; a < order; ++a) {
      for (int b = 0; a + b < order; ++b) {
        for (int c = 0; a + b + c < order; ++c) {
          double s = 0;
          for (Eigen::Index j = 0; j < q.size(); ++j) {
            s += q.weights[j] * std::pow(q.nodes(0, j), a) * std::pow(q.nodes(1, j), b) * std::pow(q.nodes(2, j), c);
          }
          // Oracle: 2 prod Gamma((k_i + 1)/2) / Gamma((a+b+c+3)/2) when all even, else 0.
          double exact = 0;
          if (a % 2 == 0 && b % 2 == 0 && c % 2 == 0) {
            exact = 2 * std::tgamma((a + 1) / 2.0) * std::tgamma((b + 1) / 2.0) * std::tgamma((c + 1) / 2.0) /
                    std::tgamma((a + b + c + 3) / 2.0);
          }
          CHECK(std::abs(s - exact) < 1e-10);
        }
      }
    }
  }
  const SphereQuad q2 = sphere_quadrature(2, 12);
  for (int a = 0; a < 12; ++a) {
    for (int b = 0; a + b < 12; ++b) {
      double s = 0;
      for (Eigen::Index j = 0; j < q2.size(); ++j) s += q2.weights[j] * std::pow(q2.nodes(0, j), a) * std::pow(q2.nodes(1, j), b);
      double exact = 0;
      if (a % 2 == 0 && b % 2 == 0) {
        exact = 2 * std::tgamma((a + 1) / 2.0) * std::tgamma((b + 1) / 2.0) / std::tgamma((a + b + 2) / 2.0);
      }
      CHECK(std::abs(s - exact) < 1e-10);
    }
  }
}

TEST_CASE("rotation invariance of sphere integrals") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> g;
  Eigen::Matrix3d m;
  for (int i = 0; i < 9; ++i) m(i / 3, i % 3) = g(rng);
  const Eigen::Matrix3d Q = Eigen::HouseholderQR<Eigen::Matrix3d>(m).householderQ();
  auto poly = [](const Point& y) { return y[0] * y[0] * y[1] + std::pow(y[2], 4) + y[0] * y[1] * y[2]; };
  const ScalarField f(Domain::whole(3), poly);
  const ScalarField fq(Domain::whole(3), [Q, poly](const Point& y) { return poly(Point(Q * Eigen::Vector3d(y))); });
  const Point o = pt({0, 0, 0});
  CHECK(std::abs(sphere_integral(f, o, 1, sphere_quadrature(3, 8)) -
                 sphere_integral(fq, o, 1, sphere_quadrature(3, 16))) < 1e-10);
}

TEST_CASE("radial grids cover their interval") {
  const RadialGrid g = RadialGrid::geometric(0, 1, 32, 0.5, Grading::GeometricToLow, 8);
  CHECK(g.panel_count() == 32);
  CHECK(g.lo() == 0.0);
  CHECK(g.hi() == doctest::Approx(1.0).epsilon(1e-15));
  for (std::size_t i = 1; i < g.panel_count(); ++i) CHECK(g.panels()[i].lo == g.panels()[i - 1].hi);
  CHECK(g.panels()[1].hi - g.panels()[1].lo < g.panels()[2].hi - g.panels()[2].lo);
  CHECK(g.panels()[30].hi - g.panels()[30].lo < g.panels()[31].hi - g.panels()[31].lo);
  CHECK(g.rule().weights.sum() == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("finite-difference residuals of simple fields") {
  const Domain d = Domain::whole(3);
  const VectorField rot(d, 3, [](const Point& x) -> Values {
    Values v(3);
    v << -x[1], x[0], 0;
    return v;
  });
  const Point x = pt({0.3, 0.1, -0.4});
  const double h = default_fd_step(d);
  CHECK(divergence_residual(rot, x, h) < 1e-9);
  CHECK(curl_residual(rot, x, h) == doctest::Approx(2.0).epsilon(1e-8));
  const Matrix j = fd_jacobian(rot, x, h);
  CHECK(std::abs(j(0, 1) + 1.0) < 1e-9);
  CHECK(std::abs(j(1, 0) - 1.0) < 1e-9);
}

TEST_CASE("domains") {
  const Domain cyl = Domain::reference_cylinder(3);
  CHECK(cyl.contains(pt({0.5, 0.5, 0.5})));
  CHECK_FALSE(cyl.contains(pt({0.9, 0.9, 0.5})));
  CHECK(cyl.contains_ball(pt({0, 0, 0.5}), 0.45));
  CHECK_FALSE(cyl.contains_ball(pt({0, 0, 0.5}), 0.55));
  CHECK(Domain::annulus(pt({0, 0}), 0.25, 0.75).contains(pt({0.5, 0})));
  CHECK_FALSE(Domain::annulus(pt({0, 0}), 0.25, 0.75).contains(pt({0.1, 0})));
  CHECK_THROWS_AS(Domain::whole(5), Error);
}
