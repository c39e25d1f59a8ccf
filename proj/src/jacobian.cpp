#include "divcurl/jacobian.hpp"

#include <cmath>

namespace divcurl {

namespace {

Matrix jac_or_fd(const VectorField& u, const Point& x) {
  return u.has_jacobian() ? u.jacobian(x) : fd_jacobian(u, x, default_fd_step(u.domain()));
}

void require_square(const VectorField& u) {
  if (u.components() != u.dim()) {
    throw Error(ErrorCode::UnsupportedDimension, "determinant needs an N x N Jacobian");
  }
}

void require_support(const VectorField& u, const TestFunction& psi) {
  if (psi.supported_in && !psi.supported_in(u.domain())) {
    throw Error(ErrorCode::SupportViolation,
                "test function " + psi.label + " is not compactly supported in the domain");
  }
}

}  // namespace

double distributional_det_pairing(const VectorField& u, const TestFunction& psi,
                                  const Cubature& cub) {
  require_square(u);
  require_support(u, psi);
  return -cub.integrate([&](const Point& x) {
    const Matrix c = cofactor(jac_or_fd(u, x));
    return u(x)[0] * c.row(0).dot(psi.gradient(x).transpose());
  });
}

double pointwise_det_pairing(const VectorField& u, const TestFunction& psi, const Cubature& cub) {
  require_square(u);
  require_support(u, psi);
  return cub.integrate([&](const Point& x) { return jac_or_fd(u, x).determinant() * psi(x); });
}

DetConsistencyReport det_consistency(const VectorField& u, const std::vector<TestFunction>& family,
                                     const Cubature& cub, double tol) {
  DetConsistencyReport rep;
  rep.tol = tol;
  for (const TestFunction& psi : family) {
    const double d = distributional_det_pairing(u, psi, cub);
    const double p = pointwise_det_pairing(u, psi, cub);
    rep.distributional.push_back(d);
    rep.pointwise.push_back(p);
    const double diff = std::abs(d - p);
    rep.max_abs_diff = std::max(rep.max_abs_diff, diff);
    const double scale = std::max(std::abs(p), 1e-300);
    rep.max_rel_diff = std::max(rep.max_rel_diff, diff == 0.0 ? 0.0 : diff / scale);
  }
  rep.pass = rep.max_rel_diff <= tol;
  return rep;
}

double piola_residual(const VectorField& u, const std::vector<Point>& cloud, double h,
                      bool graded_axis) {
  require_square(u);
  const int dim = u.dim();
  const double h0 = h > 0.0 ? h : default_fd_step(u.domain());
  const VectorField row(u.domain(), dim, [u](const Point& x) -> Values {
    return cofactor(jac_or_fd(u, x)).row(0).transpose();
  });
  double res = 0.0;
  for (const Point& x : cloud) {
    double step = h0;
    if (graded_axis) step = std::min(step, 0.01 * x.head(dim - 1).norm());
    res = std::max(res, divergence_residual(row, x, step));
  }
  return res;
}

std::vector<NamedMap> polynomial_test_maps() {
  std::vector<NamedMap> maps;
  const Domain d2 = Domain::whole(2);
  const Domain d3 = Domain::whole(3);

  maps.push_back({"(x1 + x2^2, x2)",
                  VectorField(
                      d2, 2,
                      [](const Point& x) -> Values {
                        Values v(2);
                        v << x[0] + x[1] * x[1], x[1];
                        return v;
                      },
                      [](const Point& x) -> Matrix {
                        Matrix j(2, 2);
                        j << 1.0, 2.0 * x[1], 0.0, 1.0;
                        return j;
                      })});

  maps.push_back({"(x1^2 - x2, x1 x2 + x2^3)",
                  VectorField(
                      d2, 2,
                      [](const Point& x) -> Values {
                        Values v(2);
                        v << x[0] * x[0] - x[1], x[0] * x[1] + x[1] * x[1] * x[1];
                        return v;
                      },
                      [](const Point& x) -> Matrix {
                        Matrix j(2, 2);
                        j << 2.0 * x[0], -1.0, x[1], x[0] + 3.0 * x[1] * x[1];
                        return j;
                      })});

  maps.push_back({"(2 x1 + x2, x1 - 3 x2)",
                  VectorField(
                      d2, 2,
                      [](const Point& x) -> Values {
                        Values v(2);
                        v << 2.0 * x[0] + x[1], x[0] - 3.0 * x[1];
                        return v;
                      },
                      [](const Point&) -> Matrix {
                        Matrix j(2, 2);
                        j << 2.0, 1.0, 1.0, -3.0;
                        return j;
                      })});

  maps.push_back({"(x1 + x2 x3, x2 + x1^2, x3 - x1 x2)",
                  VectorField(
                      d3, 3,
                      [](const Point& x) -> Values {
                        Values v(3);
                        v << x[0] + x[1] * x[2], x[1] + x[0] * x[0], x[2] - x[0] * x[1];
                        return v;
                      },
                      [](const Point& x) -> Matrix {
                        Matrix j(3, 3);
                        j << 1.0, x[2], x[1],  //
                            2.0 * x[0], 1.0, 0.0,  //
                            -x[1], -x[0], 1.0;
                        return j;
                      })});

  maps.push_back({"(x1^2 + x3, x2^3 - x1, x1 x2 x3 + x3)",
                  VectorField(
                      d3, 3,
                      [](const Point& x) -> Values {
                        Values v(3);
                        v << x[0] * x[0] + x[2], x[1] * x[1] * x[1] - x[0],
                            x[0] * x[1] * x[2] + x[2];
                        return v;
                      },
                      [](const Point& x) -> Matrix {
                        Matrix j(3, 3);
                        j << 2.0 * x[0], 0.0, 1.0,  //
                            -1.0, 3.0 * x[1] * x[1], 0.0,  //
                            x[1] * x[2], x[0] * x[2], x[0] * x[1] + 1.0;
                        return j;
                      })});
  return maps;
}

VectorField jump_map(int dim, double c) {
  require_supported_dim(dim);
  return VectorField(
      Domain::whole(dim), dim,
      [c](const Point& x) -> Values {
        Values v = x;
        if (x[0] > c) v[0] += 1.0;
        return v;
      },
      [dim](const Point&) -> Matrix { return Matrix::Identity(dim, dim); });
}

VectorField oscillating_perturbation(const VectorField& u, int n) {
  require_square(u);
  if (n < 1) throw Error(ErrorCode::InvalidConfig, "n must be >= 1");
  const int dim = u.dim();
  const double nn = n;
  return VectorField(
      u.domain(), dim,
      [u, nn, dim](const Point& x) -> Values {
        Values v = u(x);
        v[0] += std::sin(nn * x[dim - 1]) / (nn * nn);
        v[1] += std::sin(nn * x[0]) / nn;
        return v;
      },
      [u, nn, dim](const Point& x) -> Matrix {
        Matrix j = jac_or_fd(u, x);
        j(0, dim - 1) += std::cos(nn * x[dim - 1]) / nn;
        j(1, 0) += std::cos(nn * x[0]);
        return j;
      });
}

}  // namespace divcurl
