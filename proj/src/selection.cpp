#include "divcurl/selection.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace divcurl {

namespace {

Matrix jacobian_of(const VectorField& f, const Point& x, bool fd_fallback) {
  if (f.has_jacobian()) return f.jacobian(x);
  if (!fd_fallback) throw Error(ErrorCode::MissingGradient, "field has no analytic Jacobian");
  return fd_jacobian(f, x, default_fd_step(f.domain()));
}

struct Density {
  const VectorField& u_n;
  const VectorField& u;
  const SelectionConfig& cfg;

  double operator()(const Point& x) const {
    const double a = jacobian_of(u_n, x, cfg.fd_fallback).norm();
    const double b = jacobian_of(u, x, cfg.fd_fallback).norm();
    if (cfg.norm_kind == NormKind::Lq) return std::pow(a, cfg.q) + std::pow(b, cfg.q);
    return a + b;
  }
};

bool on_breakpoint(double t, const std::vector<RadialGrid::Panel>& panels) {
  const double tol = 1e-12 * std::max(1.0, std::abs(t));
  if (std::abs(panels.front().lo - t) <= tol) return true;
  for (const auto& p : panels) {
    if (std::abs(p.hi - t) <= tol) return true;
  }
  return false;
}

void require_sphere_inside(const VectorField& f, const Point& x0, double r) {
  if (!f.domain().contains_sphere(x0, r)) {
    throw Error(ErrorCode::DomainViolation, "sphere of radius " + std::to_string(r) +
                                                " leaves the field's domain");
  }
}

}  // namespace

GradientProfile gradient_sphere_profile(const VectorField& u_n, const VectorField& u,
                                        const SelectionConfig& cfg, const Point& x0,
                                        const RadialGrid& grid, const SphereQuad& quad) {
  const int dim = quad.dim;
  if (u_n.dim() != dim || u.dim() != dim) {
    throw Error(ErrorCode::UnsupportedDimension, "field and quadrature dimensions differ");
  }
  if (!(cfg.q >= 1.0)) throw Error(ErrorCode::InvalidExponent, "q must be >= 1");
  if (!cfg.fd_fallback && (!u_n.has_jacobian() || !u.has_jacobian())) {
    throw Error(ErrorCode::MissingGradient, "gradient profile needs Jacobians");
  }
  require_sphere_inside(u_n, x0, grid.hi());
  require_sphere_inside(u, x0, grid.hi());
  if (grid.lo() > 0.0) {
    require_sphere_inside(u_n, x0, grid.lo());
    require_sphere_inside(u, x0, grid.lo());
  }

  const Density density{u_n, u, cfg};
  const bool lorentz = cfg.norm_kind == NormKind::LorentzNMinus1;

  GradientProfile out;
  out.dim = dim;
  out.norm_kind = cfg.norm_kind;
  out.q = cfg.q;
  out.panels = grid.panels();

  auto sphere_value = [&](double r, WeightedSamples* sink, double radial_weight) {
    WeightedSamples on_sphere;
    double sum = 0.0;
    for (Eigen::Index j = 0; j < quad.size(); ++j) {
      const double v = density(x0 + r * quad.node(j));
      sum += quad.weights[j] * v;
      if (lorentz && sink == nullptr) on_sphere.add(v, quad.weights[j]);
      if (sink != nullptr) sink->add(v, radial_weight * quad.weights[j]);
    }
    if (sink != nullptr) return sum;
    return lorentz ? lorentz_norm_dim(on_sphere, dim) : sum;
  };

  std::vector<double> bps{grid.lo()};
  std::vector<double> levels;
  for (std::size_t i = 0; i < grid.panel_count(); ++i) {
    const auto& p = grid.panels()[i];
    const double mid = 0.5 * (p.lo + p.hi);
    out.midpoints.push_back(mid);
    levels.push_back(sphere_value(mid, nullptr, 0.0));
    bps.push_back(p.hi);

    const GaussRule rr = grid.panel_rule(i);
    double mass = 0.0;
    WeightedSamples samples;
    for (Eigen::Index k = 0; k < rr.nodes.size(); ++k) {
      const double w = rr.weights[k] * std::pow(rr.nodes[k], dim - 1);
      mass += w * sphere_value(rr.nodes[k], &samples, w);
    }
    out.panel_mass.push_back(mass);
    if (lorentz) out.panel_samples.push_back(std::move(samples));
  }
  out.profile = StepFunction(std::move(bps), std::move(levels));
  return out;
}

SelectionResult select_good_radii(const GradientProfile& profile, const SelectionConfig& cfg) {
  if (!(cfg.lambda > 0.0)) throw Error(ErrorCode::InvalidConfig, "lambda must be positive");
  if (profile.panels.empty()) throw Error(ErrorCode::InconsistentGrid, "empty profile");
  const IntervalSet& base = cfg.base;
  const double r0 = profile.r_inner();
  const double r1 = profile.r_outer();
  for (const auto& [a, b] : base.pieces()) {
    if (a < r0 - 1e-12 || b > r1 + 1e-12 || !on_breakpoint(a, profile.panels) ||
        !on_breakpoint(b, profile.panels)) {
      throw Error(ErrorCode::InconsistentGrid,
                  "U must be a union of profile panels inside [R0, R]");
    }
  }
  if (!(r0 > 0.0)) throw Error(ErrorCode::InconsistentGrid, "measure bound needs R0 > 0");

  const int dim = profile.dim;
  SelectionResult res;
  res.profile = profile.profile;
  res.lambda = cfg.lambda;
  double mass_in_u = 0.0;
  WeightedSamples samples_in_u;
  for (std::size_t i = 0; i < profile.panels.size(); ++i) {
    const auto& p = profile.panels[i];
    const double width = p.hi - p.lo;
    if (base.overlap(p.lo, p.hi) < 0.5 * width) continue;
    mass_in_u += profile.panel_mass[i];
    if (profile.norm_kind == NormKind::LorentzNMinus1) {
      samples_in_u.append(profile.panel_samples[i]);
    }
    const double level = profile.profile.levels()[i];
    if (level <= cfg.lambda) {
      res.selected.add(p.lo, p.hi);
      res.selected_radii.push_back(profile.midpoints[i]);
    } else {
      res.chain_middle += width * level;
    }
  }
  res.chain_middle /= cfg.lambda;
  res.measure_removed = std::max(0.0, base.measure() - res.selected.measure());

  if (profile.norm_kind == NormKind::Lq) {
    res.bound_rhs = mass_in_u / (cfg.lambda * std::pow(r0, dim - 1));
  } else {
    const double factor = std::pow(r1 - r0, (dim - 2.0) / (dim - 1.0)) / (cfg.lambda * r0);
    res.bound_rhs = factor * lorentz_norm_dim(samples_in_u, dim);
  }
  res.bound_holds = res.measure_removed <= res.bound_rhs * (1.0 + 1e-12) + 1e-15;
  return res;
}

double sphere_sobolev_exponent(double q, int dim) {
  const double k = dim - 1.0;
  if (q < k) return 1.0 / (1.0 / q - 1.0 / k);
  return std::numeric_limits<double>::infinity();
}

double trace_norm(const VectorField& u_n, const VectorField& u, double r, TraceNorm target,
                  const Point& x0, const SphereQuad& quad) {
  const int dim = quad.dim;
  double acc = 0.0;
  double sup = 0.0;
  WeightedSamples tangential;
  const double power = target.kind == TraceNorm::Kind::Ls ? target.s : dim - 1.0;
  for (Eigen::Index j = 0; j < quad.size(); ++j) {
    const Point y = quad.node(j);
    const Point x = x0 + r * y;
    const double d = (u_n(x) - u(x)).norm();
    acc += quad.weights[j] * std::pow(d, power);
    sup = std::max(sup, d);
    if (target.kind == TraceNorm::Kind::X1NMinus1) {
      const Matrix diff = jacobian_of(u_n, x, true) - jacobian_of(u, x, true);
      const Matrix proj = Matrix::Identity(dim, dim) - y * y.transpose();
      tangential.add((diff * proj).norm() * r, quad.weights[j]);
    }
  }
  switch (target.kind) {
    case TraceNorm::Kind::Ls: return std::pow(acc, 1.0 / target.s);
    case TraceNorm::Kind::C0: return sup;
    case TraceNorm::Kind::X1NMinus1:
      return std::pow(acc, 1.0 / power) + lorentz_norm_dim(tangential, dim);
  }
  return 0.0;
}

double trace_convergence_sup(const VectorField& u_n, const VectorField& u,
                             const SelectionResult& result, TraceNorm target, const Point& x0,
                             const SphereQuad& quad, const SelectionConfig& cfg) {
  const int dim = quad.dim;
  const double qstar = sphere_sobolev_exponent(cfg.q, dim);
  switch (target.kind) {
    case TraceNorm::Kind::Ls:
      if (!(target.s >= 1.0) || (cfg.q < dim - 1.0 && target.s >= qstar)) {
        throw Error(ErrorCode::ExponentOutOfRange,
                    "L^s trace needs 1 <= s < q*_{N-1} = " + std::to_string(qstar));
      }
      break;
    case TraceNorm::Kind::C0:
      if (!(cfg.q > dim - 1.0) && cfg.norm_kind != NormKind::LorentzNMinus1) {
        throw Error(ErrorCode::ExponentOutOfRange,
                    "C^0 trace needs q > N-1 or Lorentz L^{N-1,1} control");
      }
      break;
    case TraceNorm::Kind::X1NMinus1:
      if (cfg.norm_kind != NormKind::LorentzNMinus1) {
        throw Error(ErrorCode::ExponentOutOfRange, "X^{1,N-1} trace needs Lorentz control");
      }
      break;
  }
  double sup = 0.0;
  for (double r : result.selected_radii) {
    sup = std::max(sup, trace_norm(u_n, u, r, target, x0, quad));
  }
  return sup;
}

CapMaximalProfile cap_maximal_profile(const ScalarField& density, double h, const Point& x0,
                                      const RadialGrid& grid, const SphereQuad& quad,
                                      NormKind norm_kind) {
  if (!(h > 0.0 && h <= 2.0)) {
    throw Error(ErrorCode::InvalidCapRadius, "cap chord radius must lie in (0, 2]");
  }
  if (!density.domain().contains_sphere(x0, grid.hi()) ||
      (grid.lo() > 0.0 && !density.domain().contains_sphere(x0, grid.lo()))) {
    throw Error(ErrorCode::DomainViolation, "annulus leaves the density's domain");
  }
  const int dim = quad.dim;
  const Eigen::Index m = quad.size();
  std::vector<std::vector<Eigen::Index>> caps(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) {
      if ((quad.nodes.col(i) - quad.nodes.col(j)).norm() < h) caps[i].push_back(j);
    }
  }

  CapMaximalProfile out;
  out.dim = dim;
  out.norm_kind = norm_kind;
  out.h = h;
  out.panels = grid.panels();
  std::vector<double> bps{grid.lo()};
  Eigen::VectorXd values(m);
  for (const auto& p : grid.panels()) {
    const double r = 0.5 * (p.lo + p.hi);
    for (Eigen::Index j = 0; j < m; ++j) values[j] = density(x0 + r * quad.node(j));
    double best = -1.0;
    Eigen::Index best_i = 0;
    for (Eigen::Index i = 0; i < m; ++i) {
      double t = 0.0;
      if (norm_kind == NormKind::Lq) {
        for (Eigen::Index j : caps[i]) t += quad.weights[j] * values[j];
      } else {
        WeightedSamples s;
        for (Eigen::Index j : caps[i]) s.add(values[j], quad.weights[j]);
        t = lorentz_norm_dim(s, dim);
      }
      if (t > best) {
        best = t;
        best_i = i;
      }
    }
    out.radii.push_back(r);
    out.values.push_back(best);
    out.argmax.push_back(best_i);
    bps.push_back(p.hi);
  }
  out.profile = StepFunction(std::move(bps), out.values);
  return out;
}

ExceptionalSet exceptional_set(const CapMaximalProfile& t, double epsilon, int k, double r_inner,
                               double r_outer) {
  if (!(epsilon > 0.0)) throw Error(ErrorCode::InvalidConfig, "epsilon must be positive");
  if (!(r_inner > 0.0 && r_inner < r_outer)) {
    throw Error(ErrorCode::InvalidConfig, "exceptional set needs 0 < R0 < R");
  }
  ExceptionalSet out;
  out.threshold = epsilon / std::pow(2.0, k);
  for (std::size_t i = 0; i < t.values.size(); ++i) {
    if (t.values[i] > out.threshold) out.set.add(t.panels[i].lo, t.panels[i].hi);
  }
  out.measure = out.set.measure();
  const int dim = t.dim;
  if (t.norm_kind == NormKind::Lq) {
    out.bound = out.threshold / std::pow(r_inner, dim - 1);
  } else {
    out.bound = std::pow(r_outer - r_inner, (dim - 2.0) / (dim - 1.0)) / r_inner * out.threshold;
  }
  return out;
}

double equiintegrability_delta(const std::vector<WeightedSamples>& family, double epsilon, int k,
                               ModulusMode mode) {
  if (family.empty()) throw Error(ErrorCode::InsufficientData, "empty family");
  const double target = epsilon * epsilon / std::pow(4.0, k);
  double total = std::numeric_limits<double>::infinity();
  for (const auto& s : family) total = std::min(total, s.total_measure());
  auto worst = [&](double delta) {
    double w = 0.0;
    for (const auto& s : family) w = std::max(w, equiintegrability_modulus(s, delta, mode));
    return w;
  };
  if (worst(total) < target) return total;
  double lo = total * 1e-16;
  if (!(worst(lo) < target)) {
    throw Error(ErrorCode::InvalidDelta, "family is not equi-integrable at this resolution");
  }
  double hi = total;
  for (int it = 0; it < 200; ++it) {
    const double mid = std::sqrt(lo * hi);
    (worst(mid) < target ? lo : hi) = mid;
    if (hi / lo < 1.0 + 1e-12) break;
  }
  return lo;
}

double cap_radius_for_delta(double delta, int dim, double r_inner, double r_outer) {
  require_supported_dim(dim);
  const double shell = (std::pow(r_outer, dim) - std::pow(r_inner, dim)) / dim;
  const double area = delta / shell * (1.0 - 1e-9);
  double h = 0.0;
  if (dim == 3) {
    h = std::sqrt(area / std::numbers::pi);
  } else {
    h = area / 4.0 < 0.5 * std::numbers::pi ? 2.0 * std::sin(area / 4.0) : 2.0;
  }
  return std::min(h, 2.0);
}

}  // namespace divcurl
