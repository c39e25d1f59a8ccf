#include "divcurl/pairing.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace divcurl {

namespace {

bool cylinder_fits(const Domain& dom) {
  if (std::holds_alternative<WholeSpace>(dom.kind())) return true;
  if (const auto* c = std::get_if<Cylinder>(&dom.kind())) {
    return c->radius >= 1.0 - 1e-12 && c->z_lo <= 1e-12 && c->z_hi >= 1.0 - 1e-12;
  }
  return false;
}

// Residual (RMS) and coefficients of the linear fit v = a + c n^{-beta}.
struct Fit {
  double a = 0;
  double c = 0;
  double rms = 0;
};

Fit fit_fixed_rate(const std::vector<double>& n, const std::vector<double>& v, double beta) {
  const Eigen::Index m = static_cast<Eigen::Index>(n.size());
  Eigen::MatrixXd A(m, 2);
  Eigen::VectorXd b(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    A(i, 0) = 1.0;
    A(i, 1) = std::pow(n[i], -beta);
    b[i] = v[i];
  }
  const Eigen::Vector2d coef = A.colPivHouseholderQr().solve(b);
  Fit f{coef[0], coef[1], 0.0};
  f.rms = std::sqrt((A * coef - b).squaredNorm() / static_cast<double>(m));
  return f;
}

}  // namespace

TestFunction combine(double a, const TestFunction& psi1, double b, const TestFunction& psi2) {
  TestFunction t;
  t.value = [=](const Point& x) { return a * psi1.value(x) + b * psi2.value(x); };
  t.gradient = [=](const Point& x) -> Point {
    return a * psi1.gradient(x) + b * psi2.gradient(x);
  };
  t.supported_in = [=](const Domain& d) { return psi1.supported_in(d) && psi2.supported_in(d); };
  t.label = "combination(" + psi1.label + ", " + psi2.label + ")";
  return t;
}

RadialTestFunction RadialTestFunction::bump(Point x0, double R, int k) {
  if (!(R > 0.0) || k < 1) throw Error(ErrorCode::InvalidConfig, "bump needs R > 0, k >= 1");
  RadialTestFunction t;
  t.x0 = std::move(x0);
  t.R = R;
  t.phi = [R, k](double r) { return r >= R ? 0.0 : std::pow(1.0 - r * r / (R * R), k); };
  t.dphi = [R, k](double r) {
    if (r >= R) return 0.0;
    return -2.0 * k * r / (R * R) * std::pow(1.0 - r * r / (R * R), k - 1);
  };
  return t;
}

TestFunction RadialTestFunction::as_test() const {
  TestFunction t;
  const RadialTestFunction self = *this;
  t.value = [self](const Point& x) { return self.value((x - self.x0).norm()); };
  t.gradient = [self](const Point& x) -> Point {
    const Point d = x - self.x0;
    const double r = d.norm();
    if (r >= self.R || r == 0.0) return Point::Zero(x.size());
    return self.dphi(r) / r * d;
  };
  t.supported_in = [self](const Domain& d) { return d.contains_ball(self.x0, self.R); };
  t.label = "radial(R=" + std::to_string(R) + ")";
  return t;
}

bool RadialTestFunction::satisfies_restriction(int samples) const {
  if (!derivative_support) return true;
  for (int i = 0; i <= samples; ++i) {
    const double r = R * i / samples;
    if (!derivative_support->contains(r) && std::abs(dphi(r)) > 1e-14) return false;
  }
  return true;
}

double CylinderTestFunction::g_integral() const {
  const GaussRule rule = gauss_legendre(16);
  double s = 0.0;
  for (Eigen::Index i = 0; i < rule.nodes.size(); ++i) {
    s += 0.5 * rule.weights[i] * g(0.5 * (rule.nodes[i] + 1.0));
  }
  return s;
}

TestFunction CylinderTestFunction::as_test() const {
  TestFunction t;
  const CylinderTestFunction self = *this;
  t.value = [self](const Point& x) {
    const int dim = static_cast<int>(x.size());
    const double r = x.head(dim - 1).norm();
    const double z = x[dim - 1];
    if (r >= 1.0 || z <= 0.0 || z >= 1.0) return 0.0;
    return self.chi(r) * self.g(z);
  };
  t.gradient = [self](const Point& x) -> Point {
    const int dim = static_cast<int>(x.size());
    Point grad = Point::Zero(dim);
    const double r = x.head(dim - 1).norm();
    const double z = x[dim - 1];
    if (r >= 1.0 || z <= 0.0 || z >= 1.0) return grad;
    if (r > 0.0) grad.head(dim - 1) = self.dchi(r) * self.g(z) / r * x.head(dim - 1);
    grad[dim - 1] = self.chi(r) * self.dg(z);
    return grad;
  };
  t.supported_in = cylinder_fits;
  t.label = label;
  return t;
}

std::vector<CylinderTestFunction> CylinderTestFunction::standard_family() {
  auto chi = [](double t) { return (1.0 - t * t) * (1.0 - t * t); };
  auto dchi = [](double t) { return -4.0 * t * (1.0 - t * t); };
  return {
      {chi, dchi, [](double) { return 1.0; }, [](double) { return 0.0; }, "chi*1"},
      {chi, dchi, [](double z) { return z; }, [](double) { return 1.0; }, "chi*z"},
      {chi, dchi, [](double z) { return 1.0 + z * z; }, [](double z) { return 2.0 * z; },
       "chi*(1+z^2)"},
  };
}

double pair(const ScalarField& f, const TestFunction& psi, const Cubature& cub) {
  if (cub.dim != f.dim()) {
    throw Error(ErrorCode::UnsupportedDimension, "cubature and field dimensions differ");
  }
  if (psi.supported_in && !psi.supported_in(f.domain())) {
    throw Error(ErrorCode::SupportViolation,
                "test function " + psi.label + " is not supported inside the field's domain");
  }
  return cub.integrate([&](const Point& x) { return f(x) * psi.value(x); });
}

Cubature ball_cubature(const RadialTestFunction& psi, int radial_panels, int radial_order,
                       int sphere_order) {
  const RadialGrid grid = RadialGrid::uniform(0.0, psi.R, radial_panels, radial_order);
  return annulus_cubature(psi.x0, grid, sphere_quadrature(static_cast<int>(psi.x0.size()),
                                                          sphere_order));
}

Cubature axis_graded_cubature(int dim, int radial_panels, int radial_order, int angular,
                              int axial_order) {
  CylinderRuleSpec spec{
      RadialGrid::geometric(0.0, 1.0, radial_panels, 0.5, Grading::GeometricToLow, radial_order),
      angular, 1, axial_order, 0.0, 1.0};
  return cylinder_cubature(dim, spec);
}

void PairingTable::push(int index, double value) {
  if (!n.empty() && index <= n.back()) {
    throw Error(ErrorCode::InvalidConfig, "pairing table indices must increase strictly");
  }
  n.push_back(index);
  values.push_back(value);
}

LimitEstimate limit_extrapolate(const PairingTable& table) {
  const std::size_t m = table.size();
  if (m < 4) throw Error(ErrorCode::InsufficientData, "extrapolation needs >= 4 entries");
  const std::size_t k = std::max<std::size_t>(3, m / 2);
  std::vector<double> n(table.n.end() - static_cast<std::ptrdiff_t>(k), table.n.end());
  std::vector<double> v(table.values.end() - static_cast<std::ptrdiff_t>(k), table.values.end());

  LimitEstimate est;
  est.fitted = k;
  const auto [mn, mx] = std::minmax_element(v.begin(), v.end());
  if (*mx - *mn <= 1e-13 * std::max(1.0, std::abs(*mx))) {
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(k);
    double rms = 0.0;
    for (double x : v) rms += (x - mean) * (x - mean);
    est.value = mean;
    est.residual = std::sqrt(rms / static_cast<double>(k));
    return est;
  }

  constexpr double kLo = 0.05;
  constexpr double kHi = 4.0;
  constexpr double kStep = 0.05;
  double best_beta = kLo;
  double best_rms = fit_fixed_rate(n, v, kLo).rms;
  for (double beta = kLo + kStep; beta <= kHi + 1e-12; beta += kStep) {
    const double r = fit_fixed_rate(n, v, beta).rms;
    if (r < best_rms) {
      best_rms = r;
      best_beta = beta;
    }
  }
  double lo = std::max(kLo, best_beta - kStep);
  double hi = std::min(kHi, best_beta + kStep);
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double b1 = hi - g * (hi - lo);
  double b2 = lo + g * (hi - lo);
  double r1 = fit_fixed_rate(n, v, b1).rms;
  double r2 = fit_fixed_rate(n, v, b2).rms;
  for (int it = 0; it < 100 && hi - lo > 1e-10; ++it) {
    if (r1 < r2) {
      hi = b2;
      b2 = b1;
      r2 = r1;
      b1 = hi - g * (hi - lo);
      r1 = fit_fixed_rate(n, v, b1).rms;
    } else {
      lo = b1;
      b1 = b2;
      r1 = r2;
      b2 = lo + g * (hi - lo);
      r2 = fit_fixed_rate(n, v, b2).rms;
    }
  }
  double beta = 0.5 * (lo + hi);
  Fit fit = fit_fixed_rate(n, v, beta);
  if (best_rms < fit.rms) {
    beta = best_beta;
    fit = fit_fixed_rate(n, v, beta);
  }
  est.value = fit.a;
  est.rate = beta;
  est.residual = fit.rms;
  return est;
}

ConcentrationEstimate concentration_coefficient(const std::vector<PairingTable>& tables,
                                                const std::vector<CylinderTestFunction>& family,
                                                bool pointwise_vanishing) {
  if (family.size() < 2 || tables.size() != family.size()) {
    throw Error(ErrorCode::DegenerateFamily,
                "need >= 2 test functions with one pairing table each");
  }
  ConcentrationEstimate est;
  for (std::size_t i = 0; i < family.size(); ++i) {
    const double norm = family[i].chi_at_axis() * family[i].g_integral();
    if (std::abs(norm) < 1e-14) {
      throw Error(ErrorCode::DegenerateFamily,
                  "test function " + family[i].label + " has chi(0) int g = 0");
    }
    est.coefficients.push_back(limit_extrapolate(tables[i]).value / norm);
  }
  const auto [mn, mx] = std::minmax_element(est.coefficients.begin(), est.coefficients.end());
  for (double c : est.coefficients) est.mean += c;
  est.mean /= static_cast<double>(est.coefficients.size());
  est.spread = *mx - *mn;
  est.relative_spread = est.mean != 0.0 ? est.spread / std::abs(est.mean)
                                        : std::numeric_limits<double>::infinity();
  est.pointwise_vanishing = pointwise_vanishing;
  est.detected = est.relative_spread < 0.05 && pointwise_vanishing;
  return est;
}

double offaxis_sup(const ScalarField& f, double r_min, int radial_samples, int axial_samples,
                   int angular_samples) {
  const int dim = f.dim();
  double sup = 0.0;
  for (int i = 0; i <= radial_samples; ++i) {
    const double r = r_min + (1.0 - r_min) * i / radial_samples;
    for (int j = 0; j < axial_samples; ++j) {
      const double z = (j + 0.5) / axial_samples;
      for (int k = 0; k < angular_samples; ++k) {
        Point x = Point::Zero(dim);
        if (dim == 2) {
          x[0] = k % 2 == 0 ? r : -r;
        } else {
          const double phi = 2.0 * std::numbers::pi * k / angular_samples;
          x[0] = r * std::cos(phi);
          x[1] = r * std::sin(phi);
        }
        x[dim - 1] = z;
        sup = std::max(sup, std::abs(f(x)));
      }
    }
  }
  return sup;
}

double RadialFluxProfile::max_abs() const {
  double m = 0.0;
  for (double v : values) m = std::max(m, std::abs(v));
  return m;
}

RadialFluxProfile radial_flux_profile(const VectorField& f, const Point& x0, double R,
                                      const RadialGrid& grid, const SphereQuad& quad) {
  if (f.components() != f.dim() || quad.dim != f.dim()) {
    throw Error(ErrorCode::UnsupportedDimension, "flux needs a square field of the sphere's dim");
  }
  if (!f.domain().contains_ball(x0, R)) {
    throw Error(ErrorCode::DomainViolation, "ball B(x0, R) leaves the field's domain");
  }
  if (grid.lo() < 0.0 || grid.hi() > R * (1.0 + 1e-12)) {
    throw Error(ErrorCode::DomainViolation, "radial grid must lie in [0, R]");
  }
  RadialFluxProfile out;
  const GaussRule rr = grid.rule();
  for (Eigen::Index i = 0; i < rr.nodes.size(); ++i) {
    const double r = rr.nodes[i];
    double s = 0.0;
    for (Eigen::Index j = 0; j < quad.size(); ++j) {
      const Point y = quad.node(j);
      s += quad.weights[j] * f(x0 + r * y).dot(y);
    }
    const double h = std::pow(r, f.dim() - 1) * s;
    out.radii.push_back(r);
    out.values.push_back(h);
    out.samples.add(h, rr.weights[i]);
  }
  return out;
}

double lp_norm(const VectorField& f, const Cubature& cub, double p) {
  if (!(p >= 1.0)) throw Error(ErrorCode::InvalidExponent, "L^p norm needs p >= 1");
  return std::pow(cub.integrate([&](const Point& x) { return std::pow(f(x).norm(), p); }),
                  1.0 / p);
}

WeakNullReport weak_null_check(const std::vector<int>& ladder,
                               const std::function<VectorField(int)>& member,
                               const std::vector<TestFunction>& family, const Cubature& cub,
                               double p, double tol) {
  WeakNullReport rep;
  rep.tol = tol;
  rep.norms.label = "L^p norm";
  std::vector<VectorField> fields;
  for (int n : ladder) fields.push_back(member(n));
  const int comps = fields.front().components();
  for (int c = 0; c < comps; ++c) {
    for (const TestFunction& psi : family) {
      PairingTable t;
      t.label = "component " + std::to_string(c) + " x " + psi.label;
      for (std::size_t i = 0; i < ladder.size(); ++i) {
        t.push(ladder[i], pair(fields[i].component(c), psi, cub));
      }
      rep.limits.push_back(limit_extrapolate(t));
      rep.max_abs_limit = std::max(rep.max_abs_limit, std::abs(rep.limits.back().value));
      rep.tables.push_back(std::move(t));
    }
  }
  for (std::size_t i = 0; i < ladder.size(); ++i) rep.norms.push(ladder[i], lp_norm(fields[i], cub, p));

  // Least-squares slope of log ||f_n|| against log n over the last half.
  const std::size_t m = ladder.size();
  const std::size_t k = std::max<std::size_t>(2, (m + 1) / 2);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = m - k; i < m; ++i) {
    const double x = std::log(static_cast<double>(ladder[i]));
    const double y = std::log(rep.norms.values[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double kk = static_cast<double>(k);
  rep.norm_log_slope = (kk * sxy - sx * sy) / (kk * sxx - sx * sx);
  rep.norms_bounded = rep.norm_log_slope < 0.05;
  rep.pass = rep.max_abs_limit <= tol && rep.norms_bounded;
  return rep;
}

}  // namespace divcurl
