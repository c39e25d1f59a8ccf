#include "divcurl/sequences.hpp"

#include <cmath>
#include <limits>
#include <random>

namespace divcurl {

namespace {

constexpr double kAxisEps = 1e-14;

double radius_of(const Point& x) { return x.head(x.size() - 1).norm(); }

bool on_axis(const Point& x) { return radius_of(x) < kAxisEps; }

// a(r) = (1-r)^n and its first two derivatives.
struct Profile {
  int n;
  double a(double r) const { return std::pow(1.0 - r, n); }
  double da(double r) const { return -n * std::pow(1.0 - r, n - 1); }
  double dda(double r) const {
    return n == 1 ? 0.0 : n * (n - 1.0) * std::pow(1.0 - r, n - 2);
  }
};

void require_index(int n) {
  if (n < 1) throw Error(ErrorCode::InvalidConfig, "sequence index n must be >= 1");
}

}  // namespace

double critical_q(int dim, double p) {
  require_supported_dim(dim);
  const double inv = 1.0 + 1.0 / (dim - 1.0) - 1.0 / p;
  return 1.0 / inv;
}

Domain sequence_domain(int dim) {
  const double inf = std::numeric_limits<double>::infinity();
  return Domain::cylinder(dim, 1.0, -inf, inf);
}

CounterexamplePair counterexample_fields(int dim, double p, int n) {
  require_supported_dim(dim);
  require_index(n);
  if (!(p >= 1.0 && p <= dim - 1.0 + 1e-15)) {
    throw Error(ErrorCode::InvalidExponentPair,
                "p must lie in [1, N-1] for the critical pair, got p = " + std::to_string(p));
  }
  const double inv_conj = 1.0 - 1.0 / p;
  const double c_sigma = std::pow(n, (dim - 1.0) / p);
  const double c_eta = std::pow(n, (dim - 1.0) * inv_conj);
  const Profile prof{n};
  const Domain dom = sequence_domain(dim);
  const SingularSet axis = on_axis;

  VectorField sigma(
      dom, dim,
      [=](const Point& x) -> Values {
        Values v = Values::Zero(dim);
        v[dim - 1] = c_sigma * prof.a(radius_of(x));
        return v;
      },
      [=](const Point& x) -> Matrix {
        Matrix j = Matrix::Zero(dim, dim);
        const double r = radius_of(x);
        if (r < kAxisEps) return j;
        for (int k = 0; k + 1 < dim; ++k) j(dim - 1, k) = c_sigma * prof.da(r) * x[k] / r;
        return j;
      },
      axis);

  auto grad_potential = [=](const Point& x) -> Point {
    Point g = Point::Zero(dim);
    const double r = radius_of(x);
    const double zn = x[dim - 1];
    if (r >= kAxisEps) {
      for (int k = 0; k + 1 < dim; ++k) g[k] = c_eta * prof.da(r) * zn * x[k] / r;
    }
    g[dim - 1] = c_eta * prof.a(r);
    return g;
  };

  ScalarField potential(
      dom, [=](const Point& x) { return c_eta * prof.a(radius_of(x)) * x[dim - 1]; },
      grad_potential, axis);

  VectorField eta(
      dom, dim, [=](const Point& x) -> Values { return grad_potential(x); },
      [=](const Point& x) -> Matrix {
        // Hessian of c_eta a(r) x_N.
        Matrix h = Matrix::Zero(dim, dim);
        const double r = radius_of(x);
        if (r < kAxisEps) return h;
        const double zn = x[dim - 1];
        const double a1 = prof.da(r);
        const double a2 = prof.dda(r);
        for (int i = 0; i + 1 < dim; ++i) {
          for (int k = 0; k + 1 < dim; ++k) {
            const double xx = x[i] * x[k] / (r * r);
            h(i, k) = c_eta * zn * (a2 * xx + a1 * ((i == k ? 1.0 : 0.0) - xx) / r);
          }
          h(i, dim - 1) = c_eta * a1 * x[i] / r;
          h(dim - 1, i) = h(i, dim - 1);
        }
        return h;
      },
      axis);

  return CounterexamplePair{dim,
                            p,
                            p == 1.0 ? std::numeric_limits<double>::infinity() : p / (p - 1.0),
                            critical_q(dim, p),
                            n,
                            std::move(sigma),
                            std::move(eta),
                            std::move(potential)};
}

std::vector<Point> interior_cloud(int dim, std::size_t count, std::uint64_t seed, double r_min,
                                  double r_max, double margin) {
  require_supported_dim(dim);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Point> cloud;
  cloud.reserve(count);
  while (cloud.size() < count) {
    Point x(dim);
    for (int k = 0; k + 1 < dim; ++k) x[k] = 2.0 * unit(rng) - 1.0;
    x[dim - 1] = margin + (1.0 - 2.0 * margin) * unit(rng);
    const double r = radius_of(x);
    if (r >= r_min && r <= r_max) cloud.push_back(x);
  }
  return cloud;
}

StructureReport verify_structure(const CounterexamplePair& pair, double tol,
                                 const std::vector<Point>& cloud) {
  StructureReport rep;
  rep.tol = tol;
  rep.samples = cloud.size();
  const double h = default_fd_step(pair.sigma.domain());
  for (const Point& x : cloud) {
    rep.div_sigma = std::max(rep.div_sigma, divergence_residual(pair.sigma, x, h));
    rep.curl_eta = std::max(rep.curl_eta, curl_residual(pair.eta, x, h));
    rep.gradient_mismatch =
        std::max(rep.gradient_mismatch, (pair.eta(x) - pair.potential.gradient(x)).norm());
  }
  rep.pass = rep.div_sigma <= tol && rep.curl_eta <= tol && rep.gradient_mismatch <= tol;
  return rep;
}

VectorField add_divergence(const VectorField& f) {
  return VectorField(f.domain(), f.components(), [f](const Point& x) -> Values {
    Values v = f(x);
    v[0] += x[0];
    return v;
  });
}

VectorField add_curl(const VectorField& f) {
  return VectorField(f.domain(), f.components(), [f](const Point& x) -> Values {
    Values v = f(x);
    v[1] += x[0];
    return v;
  });
}

double BetaAsymptotic::limit() const {
  return std::tgamma(k + 1.0) / std::pow(alpha, k + 1);
}

double beta_asymptotic_value(const BetaAsymptotic& b) {
  if (b.k < 0 || !(b.alpha > 0.0)) {
    throw Error(ErrorCode::InvalidConfig, "Beta asymptotic needs k >= 0 and alpha > 0");
  }
  require_index(b.n);
  double v = std::tgamma(b.k + 1.0);
  for (int j = 1; j <= b.k + 1; ++j) v *= b.n / (b.n * b.alpha + j);
  return v;
}

VectorField jacobian_example_field(int dim, int n) {
  require_supported_dim(dim);
  require_index(n);
  const Profile prof{n};
  return VectorField(
      sequence_domain(dim), dim,
      [=](const Point& x) -> Values {
        const double a = prof.a(radius_of(x));
        Values v(dim);
        for (int k = 0; k + 1 < dim; ++k) v[k] = n * a * x[k];
        v[dim - 1] = a * x[dim - 1];
        return v;
      },
      [=](const Point& x) -> Matrix {
        const double r = radius_of(x);
        const double a = prof.a(r);
        Matrix j = Matrix::Zero(dim, dim);
        // On the axis the a'(r) x'/r terms carry the factor x' and vanish.
        const double a1_over_r = r < kAxisEps ? 0.0 : prof.da(r) / r;
        for (int i = 0; i + 1 < dim; ++i) {
          for (int k = 0; k + 1 < dim; ++k) {
            j(i, k) = n * (a1_over_r * x[i] * x[k] + (i == k ? a : 0.0));
          }
          j(dim - 1, i) = a1_over_r * x[dim - 1] * x[i];
        }
        j(dim - 1, dim - 1) = a;
        return j;
      },
      on_axis);
}

double jacobian_example_det(int dim, int n, double r) {
  require_supported_dim(dim);
  const double s = 1.0 - r;
  return std::pow(n, dim - 1) * std::pow(s, n * dim) -
         std::pow(n, dim) * r * std::pow(s, n * dim - 1);
}

double maximize_1d(const std::function<double(double)>& g, double a, double b, int samples) {
  if (samples < 2 || !(a < b)) throw Error(ErrorCode::InvalidConfig, "bad maximization bracket");
  const double step = (b - a) / samples;
  int best = 0;
  double best_v = g(a);
  for (int i = 1; i <= samples; ++i) {
    const double v = g(a + i * step);
    if (v > best_v) {
      best_v = v;
      best = i;
    }
  }
  double lo = a + std::max(0, best - 1) * step;
  double hi = a + std::min(samples, best + 1) * step;
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = hi - phi * (hi - lo);
  double x2 = lo + phi * (hi - lo);
  double f1 = g(x1);
  double f2 = g(x2);
  for (int it = 0; it < 200 && hi - lo > 1e-15 * (1.0 + std::abs(lo)); ++it) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + phi * (hi - lo);
      f2 = g(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - phi * (hi - lo);
      f1 = g(x1);
    }
  }
  const double xm = 0.5 * (lo + hi);
  return g(xm) >= best_v ? xm : a + best * step;
}

double jacobian_example_sup(int n, SupComponent which) {
  require_index(n);
  std::function<double(double)> g;
  if (which == SupComponent::Tangential) {
    g = [n](double r) { return n * r * std::pow(1.0 - r, n); };
  } else {
    g = [n](double r) {
      return std::pow(1.0 - r, n) * std::sqrt(n * n * r * r + 1.0);
    };
  }
  // The tangential peak sits near 1/(n+1); scanning [0, 1] with a grid fine
  // relative to that scale keeps the bracket valid for large n.
  const int samples = std::max(2000, 20 * n);
  return g(maximize_1d(g, 0.0, 1.0, samples));
}

}  // namespace divcurl
