#include "divcurl/geometry.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace divcurl {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double axial_radius(const Point& x) { return x.head(x.size() - 1).norm(); }

}  // namespace

void require_supported_dim(int dim) {
  if (dim != 2 && dim != 3) {
    throw Error(ErrorCode::UnsupportedDimension,
                "dimension " + std::to_string(dim) + " (supported: 2, 3)");
  }
}

// ---------------------------------------------------------------------------
// Domain

Domain Domain::ball(Point center, double radius) {
  require_supported_dim(static_cast<int>(center.size()));
  if (!(radius > 0.0)) throw Error(ErrorCode::DomainViolation, "ball radius must be positive");
  const int dim = static_cast<int>(center.size());
  return Domain(dim, Ball{std::move(center), radius});
}

Domain Domain::annulus(Point center, double inner, double outer) {
  require_supported_dim(static_cast<int>(center.size()));
  if (!(inner > 0.0 && inner < outer)) {
    throw Error(ErrorCode::DomainViolation, "annulus needs 0 < R0 < R");
  }
  const int dim = static_cast<int>(center.size());
  return Domain(dim, Annulus{std::move(center), inner, outer});
}

Domain Domain::cylinder(int dim, double radius, double z_lo, double z_hi) {
  require_supported_dim(dim);
  if (!(radius > 0.0 && z_lo < z_hi)) {
    throw Error(ErrorCode::DomainViolation, "cylinder needs radius > 0 and z_lo < z_hi");
  }
  return Domain(dim, Cylinder{radius, z_lo, z_hi});
}

Domain Domain::whole(int dim) {
  require_supported_dim(dim);
  return Domain(dim, WholeSpace{});
}

bool Domain::contains(const Point& x, double slack) const {
  return std::visit(
      [&](const auto& k) -> bool {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, Ball>) {
          return (x - k.center).norm() <= k.radius + slack;
        } else if constexpr (std::is_same_v<K, Annulus>) {
          const double d = (x - k.center).norm();
          return d >= k.inner - slack && d <= k.outer + slack;
        } else if constexpr (std::is_same_v<K, Cylinder>) {
          const double zn = x[x.size() - 1];
          return axial_radius(x) <= k.radius + slack && zn >= k.z_lo - slack &&
                 zn <= k.z_hi + slack;
        } else {
          return true;
        }
      },
      kind_);
}

bool Domain::contains_sphere(const Point& x0, double r, double slack) const {
  return std::visit(
      [&](const auto& k) -> bool {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, Ball>) {
          return (x0 - k.center).norm() + r <= k.radius + slack;
        } else if constexpr (std::is_same_v<K, Annulus>) {
          const double d = (x0 - k.center).norm();
          return std::abs(d - r) >= k.inner - slack && d + r <= k.outer + slack;
        } else if constexpr (std::is_same_v<K, Cylinder>) {
          const double zn = x0[x0.size() - 1];
          return axial_radius(x0) + r <= k.radius + slack && zn - r >= k.z_lo - slack &&
                 zn + r <= k.z_hi + slack;
        } else {
          return true;
        }
      },
      kind_);
}

bool Domain::contains_ball(const Point& x0, double r, double slack) const {
  if (const auto* a = std::get_if<Annulus>(&kind_)) {
    const double d = (x0 - a->center).norm();
    return d - r >= a->inner - slack && d + r <= a->outer + slack;
  }
  return contains_sphere(x0, r, slack);
}

double Domain::diameter() const {
  return std::visit(
      [&](const auto& k) -> double {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, Ball>) {
          return 2.0 * k.radius;
        } else if constexpr (std::is_same_v<K, Annulus>) {
          return 2.0 * k.outer;
        } else if constexpr (std::is_same_v<K, Cylinder>) {
          const double h = k.z_hi - k.z_lo;
          return std::sqrt(4.0 * k.radius * k.radius + h * h);
        } else {
          return kInf;
        }
      },
      kind_);
}

// ---------------------------------------------------------------------------
// Fields

Point ScalarField::gradient(const Point& x) const {
  if (!grad_) throw Error(ErrorCode::MissingGradient, "scalar field has no analytic gradient");
  return grad_(x);
}

VectorField::VectorField(Domain domain, int components, Eval eval, Jac jac, SingularSet singular)
    : domain_(std::move(domain)), components_(components), eval_(std::move(eval)),
      jac_(std::move(jac)), singular_(std::move(singular)) {
  if (components_ < 1 || components_ > kMaxDim) {
    throw Error(ErrorCode::InvalidConfig, "vector field components must be in 1..3");
  }
}

Matrix VectorField::jacobian(const Point& x) const {
  if (!jac_) throw Error(ErrorCode::MissingGradient, "vector field has no analytic Jacobian");
  return jac_(x);
}

ScalarField VectorField::component(int i) const {
  ScalarField::Grad grad;
  if (jac_) {
    grad = [jac = jac_, i](const Point& x) -> Point { return jac(x).row(i).transpose(); };
  }
  return ScalarField(
      domain_, [eval = eval_, i](const Point& x) { return eval(x)[i]; }, std::move(grad),
      singular_);
}

ScalarField VectorField::magnitude() const {
  return ScalarField(domain_, [eval = eval_](const Point& x) { return eval(x).norm(); }, {},
                     singular_);
}

VectorField gradient_field(const ScalarField& potential) {
  if (!potential.has_gradient()) {
    throw Error(ErrorCode::MissingGradient, "potential has no analytic gradient");
  }
  return VectorField(
      potential.domain(), potential.dim(),
      [potential](const Point& x) -> Values { return potential.gradient(x); }, {},
      potential.singular_set());
}

double default_fd_step(const Domain& domain) {
  double diam = domain.diameter();
  if (!std::isfinite(diam)) {
    const auto* cyl = std::get_if<Cylinder>(&domain.kind());
    diam = cyl ? 2.0 * cyl->radius : 1.0;
  }
  return 1e-5 * diam;
}

Matrix fd_jacobian(const VectorField& f, const Point& x, double h) {
  const int n = f.dim();
  const int m = f.components();
  Matrix jac(m, n);
  Point y = x;
  for (int j = 0; j < n; ++j) {
    y[j] = x[j] + 2.0 * h;
    const Values p2 = f(y);
    y[j] = x[j] + h;
    const Values p1 = f(y);
    y[j] = x[j] - h;
    const Values m1 = f(y);
    y[j] = x[j] - 2.0 * h;
    const Values m2 = f(y);
    y[j] = x[j];
    jac.col(j) = (-p2 + 8.0 * p1 - 8.0 * m1 + m2) / (12.0 * h);
  }
  return jac;
}

double divergence_residual(const VectorField& f, const Point& x, double h) {
  if (f.components() != f.dim()) {
    throw Error(ErrorCode::InvalidConfig, "divergence needs a square field");
  }
  return std::abs(fd_jacobian(f, x, h).trace());
}

double curl_residual(const VectorField& f, const Point& x, double h) {
  if (f.components() != f.dim()) {
    throw Error(ErrorCode::InvalidConfig, "curl needs a square field");
  }
  const Matrix jac = fd_jacobian(f, x, h);
  return (jac - jac.transpose()).cwiseAbs().maxCoeff();
}

// ---------------------------------------------------------------------------
// Quadrature

GaussRule gauss_legendre(int order) {
  if (order < 1) throw Error(ErrorCode::InvalidOrder, "Gauss-Legendre order must be >= 1");
  GaussRule rule{Eigen::VectorXd(order), Eigen::VectorXd(order)};
  if (order == 1) {
    rule.nodes[0] = 0.0;
    rule.weights[0] = 2.0;
    return rule;
  }
  const int half = (order + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (order + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 1; k < order; ++k) {
        const double p2 = ((2.0 * k + 1.0) * x * p1 - k * p0) / (k + 1.0);
        p0 = p1;
        p1 = p2;
      }
      dp = order * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // One more evaluation at the converged node for the weight.
    double p0 = 1.0;
    double p1 = x;
    for (int k = 1; k < order; ++k) {
      const double p2 = ((2.0 * k + 1.0) * x * p1 - k * p0) / (k + 1.0);
      p0 = p1;
      p1 = p2;
    }
    dp = order * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[order - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[order - 1 - i] = w;
  }
  if (order % 2 == 1) rule.nodes[order / 2] = 0.0;
  return rule;
}

double SphereQuad::equator_spacing() const {
  const int azimuths = dim == 2 ? order : 2 * order;
  return 2.0 * std::numbers::pi / azimuths;
}

SphereQuad sphere_quadrature(int dim, int order) {
  require_supported_dim(dim);
  if (order < 2) throw Error(ErrorCode::InvalidOrder, "sphere quadrature order must be >= 2");
  SphereQuad quad;
  quad.dim = dim;
  quad.order = order;
  if (dim == 2) {
    quad.nodes.resize(2, order);
    quad.weights = Eigen::VectorXd::Constant(order, 2.0 * std::numbers::pi / order);
    for (int k = 0; k < order; ++k) {
      // Half-step offset keeps nodes off the coordinate axes.
      const double theta = 2.0 * std::numbers::pi * (k + 0.5) / order;
      quad.nodes(0, k) = std::cos(theta);
      quad.nodes(1, k) = std::sin(theta);
    }
    return quad;
  }
  const GaussRule gl = gauss_legendre(order);
  const int azimuths = 2 * order;
  quad.nodes.resize(3, order * azimuths);
  quad.weights.resize(order * azimuths);
  const double dphi = 2.0 * std::numbers::pi / azimuths;
  Eigen::Index j = 0;
  for (int i = 0; i < order; ++i) {
    const double t = gl.nodes[i];
    const double s = std::sqrt(1.0 - t * t);
    for (int k = 0; k < azimuths; ++k, ++j) {
      const double phi = dphi * (k + 0.5);
      quad.nodes(0, j) = s * std::cos(phi);
      quad.nodes(1, j) = s * std::sin(phi);
      quad.nodes(2, j) = t;
      quad.weights[j] = gl.weights[i] * dphi;
    }
  }
  return quad;
}

RadialGrid::RadialGrid(std::vector<Panel> panels, int order, Grading grading)
    : panels_(std::move(panels)), order_(order), grading_(grading) {
  if (panels_.empty()) throw Error(ErrorCode::EmptyGrid, "radial grid has no panels");
  if (order_ < 1) throw Error(ErrorCode::InvalidOrder, "radial Gauss order must be >= 1");
  for (std::size_t i = 0; i < panels_.size(); ++i) {
    if (!(panels_[i].lo < panels_[i].hi)) {
      throw Error(ErrorCode::InconsistentGrid, "radial panels must have positive width");
    }
    if (i > 0 && panels_[i].lo != panels_[i - 1].hi) {
      throw Error(ErrorCode::InconsistentGrid, "radial panels must be contiguous");
    }
  }
  reference_ = gauss_legendre(order_);
}

RadialGrid RadialGrid::uniform(double lo, double hi, int panels, int order) {
  if (panels < 1) throw Error(ErrorCode::EmptyGrid, "need at least one panel");
  std::vector<Panel> out;
  out.reserve(panels);
  for (int i = 0; i < panels; ++i) {
    const double a = i == 0 ? lo : out.back().hi;
    const double b = i + 1 == panels ? hi : lo + (hi - lo) * (i + 1) / panels;
    out.push_back({a, b});
  }
  return RadialGrid(std::move(out), order, Grading::Uniform);
}

RadialGrid RadialGrid::geometric(double lo, double hi, int panels, double ratio, Grading toward,
                                 int order) {
  if (panels < 1) throw Error(ErrorCode::EmptyGrid, "need at least one panel");
  if (!(ratio > 0.0 && ratio < 1.0)) {
    throw Error(ErrorCode::InvalidConfig, "geometric ratio must lie in (0, 1)");
  }
  if (toward != Grading::GeometricToLow && toward != Grading::GeometricToHigh) {
    throw Error(ErrorCode::InvalidConfig, "geometric grading needs a direction");
  }
  // Offsets from the graded endpoint: 0, L r^{P-1}, L r^{P-2}, ..., L.
  const double length = hi - lo;
  std::vector<double> offsets{0.0};
  for (int i = panels - 1; i >= 0; --i) offsets.push_back(length * std::pow(ratio, i));
  offsets.back() = length;
  std::vector<double> bps;
  bps.reserve(offsets.size());
  if (toward == Grading::GeometricToLow) {
    for (double o : offsets) bps.push_back(lo + o);
    bps.back() = hi;
  } else {
    for (auto it = offsets.rbegin(); it != offsets.rend(); ++it) bps.push_back(hi - *it);
    bps.front() = lo;
  }
  std::vector<Panel> out;
  for (std::size_t i = 0; i + 1 < bps.size(); ++i) out.push_back({bps[i], bps[i + 1]});
  return RadialGrid(std::move(out), order, toward);
}

RadialGrid RadialGrid::from_breakpoints(std::vector<double> breakpoints, int order) {
  if (breakpoints.size() < 2) throw Error(ErrorCode::EmptyGrid, "need at least two breakpoints");
  std::vector<Panel> out;
  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
    out.push_back({breakpoints[i], breakpoints[i + 1]});
  }
  return RadialGrid(std::move(out), order, Grading::Custom);
}

GaussRule RadialGrid::panel_rule(std::size_t i) const {
  const Panel& p = panels_.at(i);
  const double mid = 0.5 * (p.lo + p.hi);
  const double half = 0.5 * (p.hi - p.lo);
  GaussRule rule;
  rule.nodes = (mid + half * reference_.nodes.array()).matrix();
  rule.weights = half * reference_.weights;
  return rule;
}

GaussRule RadialGrid::rule() const {
  const Eigen::Index per = order_;
  GaussRule out{Eigen::VectorXd(per * panels_.size()), Eigen::VectorXd(per * panels_.size())};
  for (std::size_t i = 0; i < panels_.size(); ++i) {
    const GaussRule r = panel_rule(i);
    out.nodes.segment(i * per, per) = r.nodes;
    out.weights.segment(i * per, per) = r.weights;
  }
  return out;
}

double sphere_integral(const ScalarField& f, const Point& x0, double r, const SphereQuad& quad) {
  if (f.dim() != quad.dim || x0.size() != quad.dim) {
    throw Error(ErrorCode::UnsupportedDimension, "field, centre and quadrature dimensions differ");
  }
  if (!f.domain().contains_sphere(x0, r)) {
    std::ostringstream msg;
    msg << "sphere of radius " << r << " leaves the field's domain";
    throw Error(ErrorCode::DomainViolation, msg.str());
  }
  double sum = 0.0;
  for (Eigen::Index j = 0; j < quad.size(); ++j) {
    sum += quad.weights[j] * f(x0 + r * quad.node(j));
  }
  return sum;
}

double annulus_integral(const ScalarField& f, const Point& x0, double r_inner, double r_outer,
                        const RadialGrid& grid, const SphereQuad& quad) {
  if (grid.empty()) throw Error(ErrorCode::EmptyGrid, "radial grid has no panels");
  const double tol = 1e-12 * std::max(1.0, r_outer);
  if (std::abs(grid.lo() - r_inner) > tol || std::abs(grid.hi() - r_outer) > tol) {
    throw Error(ErrorCode::DomainViolation, "radial grid does not span [R0, R]");
  }
  if (!(r_inner >= 0.0 && r_inner < r_outer)) {
    throw Error(ErrorCode::DomainViolation, "annulus needs 0 <= R0 < R");
  }
  if (!f.domain().contains_sphere(x0, r_outer) ||
      (r_inner > 0.0 && !f.domain().contains_sphere(x0, r_inner))) {
    throw Error(ErrorCode::DomainViolation, "annulus leaves the field's domain");
  }
  const int n = quad.dim;
  double total = 0.0;
  for (std::size_t i = 0; i < grid.panel_count(); ++i) {
    const GaussRule rr = grid.panel_rule(i);
    for (Eigen::Index k = 0; k < rr.nodes.size(); ++k) {
      const double r = rr.nodes[k];
      double s = 0.0;
      for (Eigen::Index j = 0; j < quad.size(); ++j) s += quad.weights[j] * f(x0 + r * quad.node(j));
      total += rr.weights[k] * std::pow(r, n - 1) * s;
    }
  }
  return total;
}

double cap_area(double h, int dim) {
  require_supported_dim(dim);
  if (!(h > 0.0 && h <= 2.0)) {
    throw Error(ErrorCode::InvalidCapRadius, "cap chord radius must lie in (0, 2]");
  }
  if (dim == 2) return 4.0 * std::asin(0.5 * h);
  return std::numbers::pi * h * h;
}

Cubature annulus_cubature(const Point& x0, const RadialGrid& grid, const SphereQuad& quad) {
  const int n = quad.dim;
  const GaussRule rr = grid.rule();
  Cubature cub;
  cub.dim = n;
  cub.points.resize(n, rr.nodes.size() * quad.size());
  cub.weights.resize(rr.nodes.size() * quad.size());
  Eigen::Index idx = 0;
  for (Eigen::Index k = 0; k < rr.nodes.size(); ++k) {
    const double r = rr.nodes[k];
    const double wr = rr.weights[k] * std::pow(r, n - 1);
    for (Eigen::Index j = 0; j < quad.size(); ++j, ++idx) {
      cub.points.col(idx) = x0 + r * quad.nodes.col(j);
      cub.weights[idx] = wr * quad.weights[j];
    }
  }
  return cub;
}

Cubature cylinder_cubature(int dim, const CylinderRuleSpec& spec) {
  require_supported_dim(dim);
  if (spec.radial.lo() < 0.0) throw Error(ErrorCode::DomainViolation, "radial grid below 0");
  if (spec.angular < 1 || spec.axial_panels < 1 || spec.axial_order < 1) {
    throw Error(ErrorCode::InvalidOrder, "cylinder rule needs positive node counts");
  }
  const GaussRule rr = spec.radial.rule();
  const RadialGrid axial = RadialGrid::uniform(spec.z_lo, spec.z_hi, spec.axial_panels,
                                               spec.axial_order);
  const GaussRule zz = axial.rule();

  // Nodes on S_{N-2}: the circle for N = 3, {-1, +1} (counting measure) for N = 2.
  std::vector<Eigen::Vector2d> dirs;
  std::vector<double> dir_w;
  if (dim == 2) {
    dirs = {Eigen::Vector2d(-1.0, 0.0), Eigen::Vector2d(1.0, 0.0)};
    dir_w = {1.0, 1.0};
  } else {
    const double dphi = 2.0 * std::numbers::pi / spec.angular;
    for (int k = 0; k < spec.angular; ++k) {
      const double phi = dphi * (k + 0.5);
      dirs.emplace_back(std::cos(phi), std::sin(phi));
      dir_w.push_back(dphi);
    }
  }

  const Eigen::Index count =
      rr.nodes.size() * static_cast<Eigen::Index>(dirs.size()) * zz.nodes.size();
  Cubature cub;
  cub.dim = dim;
  cub.points.resize(dim, count);
  cub.weights.resize(count);
  Eigen::Index idx = 0;
  for (Eigen::Index i = 0; i < rr.nodes.size(); ++i) {
    const double r = rr.nodes[i];
    const double wr = rr.weights[i] * std::pow(r, dim - 2);
    for (std::size_t k = 0; k < dirs.size(); ++k) {
      for (Eigen::Index m = 0; m < zz.nodes.size(); ++m, ++idx) {
        if (dim == 2) {
          cub.points(0, idx) = r * dirs[k][0];
          cub.points(1, idx) = zz.nodes[m];
        } else {
          cub.points(0, idx) = r * dirs[k][0];
          cub.points(1, idx) = r * dirs[k][1];
          cub.points(2, idx) = zz.nodes[m];
        }
        cub.weights[idx] = wr * dir_w[k] * zz.weights[m];
      }
    }
  }
  return cub;
}

}  // namespace divcurl
