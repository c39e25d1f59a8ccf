#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "divcurl/jacobian.hpp"
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

VectorField linear(const Matrix& A) {
  const int dim = static_cast<int>(A.rows());
  return VectorField(Domain::whole(dim), dim, [A](const Point& x) -> Values { return A * x; },
                     [A](const Point&) -> Matrix { return A; });
}

}  // namespace

TEST_CASE("cofactor examples") {
  CHECK((cofactor(Matrix::Identity(3, 3)) - Matrix::Identity(3, 3)).norm() == 0.0);
  Matrix d(2, 2);
  d << 2, 0, 0, 3;
  Matrix e(2, 2);
  e << 3, 0, 0, 2;
  CHECK((cofactor(d) - e).norm() == 0.0);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int i = 0; i < 50; ++i) {
    Matrix J(3, 3);
    for (int k = 0; k < 9; ++k) J(k / 3, k % 3) = u(rng);
    const Matrix ref = J.determinant() * J.inverse().transpose();
    CHECK((cofactor(J) - ref).norm() <= 1e-10 * ref.norm());
    CHECK((cofactor(J).transpose() * J - J.determinant() * Matrix::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-12);
  }
  CHECK_THROWS_AS(cofactor(Matrix::Identity(1, 1)), Error);
}

TEST_CASE("identity and linear maps") {
  const RadialTestFunction psi = RadialTestFunction::bump(pt({0.1, -0.1}), 0.6, 3);
  const Cubature cub = ball_cubature(psi, 4, 12, 32);
  const double mass = cub.integrate([&](const Point& x) { return psi.as_test()(x); });
  // Closed form: int (1 - r^2/R^2)^3 over the disc = pi R^2 / 4.
  CHECK(mass == doctest::Approx(pi * 0.36 / 4).epsilon(1e-12));
  const VectorField id = linear(Matrix::Identity(2, 2));
  CHECK(distributional_det_pairing(id, psi.as_test(), cub) == doctest::Approx(mass).epsilon(1e-12));
  CHECK(pointwise_det_pairing(id, psi.as_test(), cub) == doctest::Approx(mass).epsilon(1e-12));
  Matrix A(2, 2);
  A << 2, 1, 1, -3;
  CHECK(distributional_det_pairing(linear(A), psi.as_test(), cub) == doctest::Approx(-7 * mass).epsilon(1e-12));
  const double c = std::cos(0.7), s = std::sin(0.7);
  Matrix R(2, 2);
  R << c, -s, s, c;
  CHECK(pointwise_det_pairing(linear(R), psi.as_test(), cub) == doctest::Approx(mass).epsilon(1e-12));
  const DetConsistencyReport rep = det_consistency(id, {psi.as_test()}, cub, 1e-12);
  CHECK(rep.max_abs_diff < 1e-12);
}

TEST_CASE("polynomial maps: divergence form equals pointwise determinant") {
  for (const NamedMap& m : polynomial_test_maps()) {
    const int dim = m.map.dim();
    Point c = Point::Zero(dim);
    c[0] = 0.15;
    const RadialTestFunction psi = RadialTestFunction::bump(c, 0.6, 4);
    const DetConsistencyReport rep = det_consistency(m.map, {psi.as_test()}, ball_cubature(psi, 4, 12, 24), 1e-8);
    CHECK_MESSAGE(rep.pass, m.name);
  }
}

TEST_CASE("jump map is flagged") {
  const RadialTestFunction psi = RadialTestFunction::bump(pt({0, 0}), 0.7, 4);
  const DetConsistencyReport rep = det_consistency(jump_map(2), {psi.as_test()}, ball_cubature(psi, 16, 16, 256), 1e-6);
  CHECK_FALSE(rep.pass);
  CHECK(rep.max_abs_diff > 0.05);
}

TEST_CASE("Piola identity") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  std::vector<Point> c2, c3;
  for (int i = 0; i < 100; ++i) {
    c2.push_back(pt({u(rng), u(rng)}));
    c3.push_back(pt({u(rng), u(rng), u(rng)}));
  }
  Matrix A(3, 3);
  A << 1, 2, 0, -1, 3, 1, 0.5, 0, 2;
  CHECK(piola_residual(linear(A), c3) < 1e-10);
  for (const NamedMap& m : polynomial_test_maps()) {
    CHECK_MESSAGE(piola_residual(m.map, m.map.dim() == 2 ? c2 : c3) < 1e-5, m.name);
  }
  CHECK(piola_residual(jacobian_example_field(3, 64), interior_cloud(3, 100, 1, 0.05, 0.95), 0.0, true) < 1e-4);
}

TEST_CASE("concentrating map: divergence form vs pointwise at n = 64") {
  const RadialTestFunction psi = RadialTestFunction::bump(pt({0, 0, 0.5}), 0.45, 4);
  const CylinderRuleSpec spec{RadialGrid::geometric(0.0, 0.45, 24, 0.5, Grading::GeometricToLow, 16), 16, 8, 16, 0.05, 0.95};
  const Cubature cub = cylinder_cubature(3, spec);
  const VectorField un = jacobian_example_field(3, 64);
  const double d = distributional_det_pairing(un, psi.as_test(), cub);
  const double p = pointwise_det_pairing(un, psi.as_test(), cub);
  CHECK(std::abs(d - p) <= 0.01 * std::abs(p));
}

TEST_CASE("oscillating perturbation converges weakly") {
  const VectorField base = polynomial_test_maps().front().map;
  const VectorField u8 = oscillating_perturbation(base, 8);
  const Point x = pt({0.2, 0.3});
  CHECK((u8(x) - base(x)).norm() < 0.2);
  CHECK((u8.jacobian(x) - fd_jacobian(u8, x, 1e-5)).cwiseAbs().maxCoeff() < 1e-6);
  CHECK_THROWS_AS(oscillating_perturbation(base, 0), Error);
}
