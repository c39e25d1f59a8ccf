#pragma once

// Domains, fields, and quadrature on spheres, annuli, balls and cylinders
// in dimensions 2 and 3.

#include <Eigen/Dense>

#include <functional>
#include <limits>
#include <variant>
#include <vector>

#include "divcurl/error.hpp"

namespace divcurl {

inline constexpr int kMaxDim = 3;

using Point = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxDim, 1>;
using Values = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxDim, 1>;
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxDim, kMaxDim>;

void require_supported_dim(int dim);

// ---------------------------------------------------------------------------
// Domains

struct Ball {
  Point center;
  double radius;
};

struct Annulus {
  Point center;
  double inner;
  double outer;
};

/// B'_radius x (z_lo, z_hi) in coordinates (x', x_N); the axis is {x' = 0}.
/// Infinite z bounds describe the slab-free cylinder on which the analytic
/// sequence fields are defined.
struct Cylinder {
  double radius = 1.0;
  double z_lo = 0.0;
  double z_hi = 1.0;
};

struct WholeSpace {};

class Domain {
 public:
  using Kind = std::variant<Ball, Annulus, Cylinder, WholeSpace>;

  static Domain ball(Point center, double radius);
  static Domain annulus(Point center, double inner, double outer);
  static Domain cylinder(int dim, double radius = 1.0, double z_lo = 0.0, double z_hi = 1.0);
  /// Omega = B'_1 x (0,1).
  static Domain reference_cylinder(int dim) { return cylinder(dim); }
  static Domain whole(int dim);

  int dim() const noexcept { return dim_; }
  const Kind& kind() const noexcept { return kind_; }

  /// Membership in the closure (up to `slack`).
  bool contains(const Point& x, double slack = 1e-12) const;
  bool contains_sphere(const Point& x0, double r, double slack = 1e-12) const;
  bool contains_ball(const Point& x0, double r, double slack = 1e-12) const;
  double diameter() const;

 private:
  Domain(int dim, Kind kind) : dim_(dim), kind_(std::move(kind)) {}

  int dim_;
  Kind kind_;
};

// ---------------------------------------------------------------------------
// Fields

/// Predicate flagging points where a field's formula is undefined
/// (for instance the cylinder axis where x'/|x'| has no direction).
using SingularSet = std::function<bool(const Point&)>;

class ScalarField {
 public:
  using Eval = std::function<double(const Point&)>;
  using Grad = std::function<Point(const Point&)>;

  ScalarField(Domain domain, Eval eval, Grad grad = {}, SingularSet singular = {})
      : domain_(std::move(domain)), eval_(std::move(eval)), grad_(std::move(grad)),
        singular_(std::move(singular)) {}

  int dim() const noexcept { return domain_.dim(); }
  const Domain& domain() const noexcept { return domain_; }

  double operator()(const Point& x) const { return eval_(x); }
  bool has_gradient() const noexcept { return static_cast<bool>(grad_); }
  Point gradient(const Point& x) const;
  bool is_singular(const Point& x) const { return singular_ && singular_(x); }
  const SingularSet& singular_set() const noexcept { return singular_; }

 private:
  Domain domain_;
  Eval eval_;
  Grad grad_;
  SingularSet singular_;
};

/// Map R^N -> R^M (M = `components`), optionally with its analytic M x N
/// Jacobian. M = 1 with a gradient is a scalar potential; M = N is a plain
/// vector field.
class VectorField {
 public:
  using Eval = std::function<Values(const Point&)>;
  using Jac = std::function<Matrix(const Point&)>;

  VectorField(Domain domain, int components, Eval eval, Jac jac = {}, SingularSet singular = {});

  int dim() const noexcept { return domain_.dim(); }
  int components() const noexcept { return components_; }
  const Domain& domain() const noexcept { return domain_; }

  Values operator()(const Point& x) const { return eval_(x); }
  bool has_jacobian() const noexcept { return static_cast<bool>(jac_); }
  Matrix jacobian(const Point& x) const;
  bool is_singular(const Point& x) const { return singular_ && singular_(x); }
  const SingularSet& singular_set() const noexcept { return singular_; }

  ScalarField component(int i) const;
  /// x -> |F(x)| (Euclidean norm of the component vector).
  ScalarField magnitude() const;

 private:
  Domain domain_;
  int components_;
  Eval eval_;
  Jac jac_;
  SingularSet singular_;
};

/// Gradient field of a scalar potential with an analytic gradient.
VectorField gradient_field(const ScalarField& potential);

/// Default finite-difference step: 1e-5 times the domain diameter.
double default_fd_step(const Domain& domain);

/// Fourth-order central finite-difference Jacobian (components x dim).
Matrix fd_jacobian(const VectorField& f, const Point& x, double h);

/// |div F(x)| by central differences.
double divergence_residual(const VectorField& f, const Point& x, double h);

/// max_{i<j} |d_i F_j - d_j F_i| by central differences.
double curl_residual(const VectorField& f, const Point& x, double h);

// ---------------------------------------------------------------------------
// Quadrature

struct GaussRule {
  Eigen::VectorXd nodes;  // on [-1, 1]
  Eigen::VectorXd weights;
};

GaussRule gauss_legendre(int order);

struct SphereQuad {
  int dim = 0;
  int order = 0;
  Eigen::MatrixXd nodes;  // dim x count, unit vectors
  Eigen::VectorXd weights;

  Eigen::Index size() const noexcept { return weights.size(); }
  Point node(Eigen::Index j) const { return nodes.col(j); }
  /// Node spacing along the equator (2 pi / number of azimuths).
  double equator_spacing() const;
};

/// N = 2: `order` equally spaced angles. N = 3: Gauss-Legendre in cos(theta)
/// with `order` points times 2*order uniform azimuths.
SphereQuad sphere_quadrature(int dim, int order);

enum class Grading { Uniform, GeometricToLow, GeometricToHigh, Custom };

class RadialGrid {
 public:
  struct Panel {
    double lo;
    double hi;
  };

  static RadialGrid uniform(double lo, double hi, int panels, int order);
  /// Panel widths shrink by `ratio` toward the chosen endpoint.
  static RadialGrid geometric(double lo, double hi, int panels, double ratio, Grading toward,
                              int order);
  static RadialGrid from_breakpoints(std::vector<double> breakpoints, int order);

  double lo() const noexcept { return panels_.front().lo; }
  double hi() const noexcept { return panels_.back().hi; }
  int order() const noexcept { return order_; }
  Grading grading() const noexcept { return grading_; }
  const std::vector<Panel>& panels() const noexcept { return panels_; }
  std::size_t panel_count() const noexcept { return panels_.size(); }
  bool empty() const noexcept { return panels_.empty(); }

  /// Gauss nodes/weights mapped to panel i.
  GaussRule panel_rule(std::size_t i) const;
  /// All nodes and weights, panel by panel.
  GaussRule rule() const;

 private:
  RadialGrid(std::vector<Panel> panels, int order, Grading grading);

  std::vector<Panel> panels_;
  GaussRule reference_;
  int order_;
  Grading grading_;
};

/// sum_j w_j f(x0 + r y_j); the r^{N-1} factor is left to the caller.
double sphere_integral(const ScalarField& f, const Point& x0, double r, const SphereQuad& quad);

/// Integral over the annulus C(R0, R) centred at x0 (R0 = 0 gives the ball),
/// radial panels composed with the sphere rule and the r^{N-1} Jacobian.
double annulus_integral(const ScalarField& f, const Point& x0, double r_inner, double r_outer,
                        const RadialGrid& grid, const SphereQuad& quad);

/// |B(e1, h) cap S_{N-1}|: 4 asin(h/2) for N = 2, pi h^2 for N = 3.
double cap_area(double h, int dim);

// ---------------------------------------------------------------------------
// Point-cloud cubature

/// Flat list of points and weights realizing an integral over a region.
struct Cubature {
  int dim = 0;
  Eigen::MatrixXd points;  // dim x count
  Eigen::VectorXd weights;

  Eigen::Index size() const noexcept { return weights.size(); }
  Point point(Eigen::Index j) const { return points.col(j); }

  template <class F>
  double integrate(F&& f) const {
    double sum = 0.0;
    for (Eigen::Index j = 0; j < size(); ++j) sum += weights[j] * f(point(j));
    return sum;
  }
};

/// Spherical-coordinate cubature of the annulus C(R0, R) around x0.
Cubature annulus_cubature(const Point& x0, const RadialGrid& grid, const SphereQuad& quad);

/// Cylindrical-coordinate cubature of B'_radius x (z_lo, z_hi):
/// radial grid in |x'| (must lie in [0, radius]), `angular` nodes on S_{N-2}
/// (ignored for N = 2, where S_0 = {-1, +1} with unit weights), and
/// `axial_panels` Gauss panels of `axial_order` points in x_N.
struct CylinderRuleSpec {
  RadialGrid radial;
  int angular = 16;
  int axial_panels = 1;
  int axial_order = 8;
  double z_lo = 0.0;
  double z_hi = 1.0;
};

Cubature cylinder_cubature(int dim, const CylinderRuleSpec& spec);

}  // namespace divcurl
