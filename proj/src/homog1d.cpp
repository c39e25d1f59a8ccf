#include "divcurl/homog1d.hpp"

#include <algorithm>
#include <cmath>

#include "divcurl/geometry.hpp"

namespace divcurl {

LaminateCoefficient LaminateCoefficient::constant(double a) {
  return LaminateCoefficient{1, {{1.0, a}}, a};
}

LaminateCoefficient LaminateCoefficient::two_phase(int n, double a1, double a2, double theta) {
  return LaminateCoefficient{n, {{theta, a1}, {1.0 - theta, a2}}, std::min(a1, a2)};
}

LaminateCoefficient LaminateCoefficient::stiff_inclusion(int n) {
  if (n < 2) throw Error(ErrorCode::InvalidConfig, "stiff inclusion needs n >= 2");
  const double nn = n;
  return LaminateCoefficient{n, {{1.0 - 1.0 / nn, 1.0}, {1.0 / nn, nn}}, 1.0};
}

void LaminateCoefficient::validate() const {
  if (n < 1 || phases.empty()) throw Error(ErrorCode::InvalidConfig, "laminate needs cells");
  double total = 0.0;
  for (const Phase& ph : phases) {
    if (!(ph.theta > 0.0)) throw Error(ErrorCode::InvalidConfig, "phase fractions must be > 0");
    total += ph.theta;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw Error(ErrorCode::InvalidConfig, "phase fractions must sum to 1");
  }
  if (!(alpha > 0.0)) throw Error(ErrorCode::NonCoercive, "coercivity constant must be > 0");
  for (const Phase& ph : phases) {
    if (ph.value < alpha) {
      throw Error(ErrorCode::NonCoercive, "coefficient value " + std::to_string(ph.value) +
                                              " below alpha = " + std::to_string(alpha));
    }
  }
}

std::vector<double> LaminateCoefficient::breakpoints() const {
  std::vector<double> bps{0.0};
  for (int i = 0; i < n; ++i) {
    double cum = 0.0;
    for (std::size_t k = 0; k < phases.size(); ++k) {
      cum += phases[k].theta;
      const bool last = k + 1 == phases.size();
      bps.push_back(last && i + 1 == n ? 1.0 : (i + (last ? 1.0 : cum)) / n);
    }
  }
  return bps;
}

std::vector<double> LaminateCoefficient::piece_values() const {
  std::vector<double> vals;
  vals.reserve(static_cast<std::size_t>(n) * phases.size());
  for (int i = 0; i < n; ++i) {
    for (const Phase& ph : phases) vals.push_back(ph.value);
  }
  return vals;
}

double LaminateCoefficient::operator()(double x) const {
  const double cell = x * n - std::floor(x * n);
  double cum = 0.0;
  for (const Phase& ph : phases) {
    cum += ph.theta;
    if (cell < cum) return ph.value;
  }
  return phases.back().value;
}

double LaminateCoefficient::sup() const {
  double s = 0.0;
  for (const Phase& ph : phases) s = std::max(s, ph.value);
  return s;
}

double LaminateCoefficient::l_rho_norm(double rho) const {
  if (!(rho >= 1.0)) throw Error(ErrorCode::InvalidExponent, "rho must be >= 1");
  double s = 0.0;
  for (const Phase& ph : phases) s += ph.theta * std::pow(ph.value, rho);
  return std::pow(s, 1.0 / rho);
}

std::size_t TwoPointSolution::piece(double x) const {
  const auto it = std::upper_bound(bps_.begin(), bps_.end(), x);
  const auto k = static_cast<std::size_t>(std::max<std::ptrdiff_t>(1, it - bps_.begin())) - 1;
  return std::min(k, vals_.size() - 1);
}

double TwoPointSolution::piece_integral(std::size_t, double lo, double hi,
                                        const std::function<double(double)>& g) const {
  if (hi <= lo) return 0.0;
  static thread_local int cached_order = -1;
  static thread_local GaussRule rule;
  if (cached_order != order_) {
    rule = gauss_legendre(order_);
    cached_order = order_;
  }
  const double mid = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  double s = 0.0;
  for (Eigen::Index i = 0; i < rule.nodes.size(); ++i) {
    s += rule.weights[i] * g(mid + half * rule.nodes[i]);
  }
  return half * s;
}

double TwoPointSolution::load_antiderivative(double x) const {
  const std::size_t k = piece(x);
  return F_at_[k] + piece_integral(k, bps_[k], x, f_);
}

double TwoPointSolution::flux(double x) const { return c_ - load_antiderivative(x); }

double TwoPointSolution::du(double x) const { return flux(x) / vals_[piece(x)]; }

double TwoPointSolution::u(double x) const {
  const std::size_t k = piece(x);
  const double a = vals_[k];
  return u_at_[k] + piece_integral(k, bps_[k], x, [&](double t) {
           return (c_ - F_at_[k] - piece_integral(k, bps_[k], t, f_)) / a;
         });
}

double TwoPointSolution::integrate(const std::function<double(double)>& g, int order) const {
  const GaussRule rule = gauss_legendre(order);
  double s = 0.0;
  for (std::size_t k = 0; k < vals_.size(); ++k) {
    const double mid = 0.5 * (bps_[k] + bps_[k + 1]);
    const double half = 0.5 * (bps_[k + 1] - bps_[k]);
    for (Eigen::Index i = 0; i < rule.nodes.size(); ++i) {
      s += half * rule.weights[i] * g(mid + half * rule.nodes[i]);
    }
  }
  return s;
}

double TwoPointSolution::energy() const {
  double s = 0.0;
  for (std::size_t k = 0; k < vals_.size(); ++k) {
    const double a = vals_[k];
    s += piece_integral(k, bps_[k], bps_[k + 1], [&](double t) {
      const double q = c_ - F_at_[k] - piece_integral(k, bps_[k], t, f_);
      return q * q / a;
    });
  }
  return s;
}

double TwoPointSolution::gradient_l2_sq() const {
  double s = 0.0;
  for (std::size_t k = 0; k < vals_.size(); ++k) {
    const double a = vals_[k];
    s += piece_integral(k, bps_[k], bps_[k + 1], [&](double t) {
      const double q = (c_ - F_at_[k] - piece_integral(k, bps_[k], t, f_)) / a;
      return q * q;
    });
  }
  return s;
}

double TwoPointSolution::load_work() const {
  double s = 0.0;
  for (std::size_t k = 0; k < vals_.size(); ++k) {
    s += piece_integral(k, bps_[k], bps_[k + 1], [&](double t) { return f_(t) * u(t); });
  }
  return s;
}

TwoPointSolution solve_two_point(const LaminateCoefficient& a, const Load& f, int order) {
  a.validate();
  if (order < 1) throw Error(ErrorCode::InvalidOrder, "Gauss order must be >= 1");
  TwoPointSolution sol;
  sol.bps_ = a.breakpoints();
  sol.vals_ = a.piece_values();
  sol.f_ = f;
  sol.order_ = order;
  const std::size_t m = sol.vals_.size();

  sol.F_at_.assign(m + 1, 0.0);
  for (std::size_t k = 0; k < m; ++k) {
    sol.F_at_[k + 1] = sol.F_at_[k] + sol.piece_integral(k, sol.bps_[k], sol.bps_[k + 1], f);
  }
  // c = int F/a / int 1/a makes int_0^1 u' = 0.
  double num = 0.0;
  double den = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    const double lo = sol.bps_[k];
    num += sol.piece_integral(k, lo, sol.bps_[k + 1], [&](double t) {
             return sol.F_at_[k] + sol.piece_integral(k, lo, t, f);
           }) / sol.vals_[k];
    den += (sol.bps_[k + 1] - lo) / sol.vals_[k];
  }
  sol.c_ = num / den;

  sol.u_at_.assign(m + 1, 0.0);
  for (std::size_t k = 0; k < m; ++k) {
    const double lo = sol.bps_[k];
    sol.u_at_[k + 1] = sol.u_at_[k] + sol.piece_integral(k, lo, sol.bps_[k + 1], [&](double t) {
                         return (sol.c_ - sol.F_at_[k] - sol.piece_integral(k, lo, t, f)) /
                                sol.vals_[k];
                       });
  }
  return sol;
}

double effective_coefficient(const LaminateCoefficient& a) {
  a.validate();
  double s = 0.0;
  for (const Phase& ph : a.phases) s += ph.theta / ph.value;
  return 1.0 / s;
}

HLimitReport flux_convergence_test(const std::vector<LaminateCoefficient>& ladder, double a_star,
                                   const Load& f, const std::vector<Load>& tests) {
  if (ladder.empty()) throw Error(ErrorCode::InsufficientData, "empty coefficient ladder");
  HLimitReport rep;
  rep.a_star = a_star;
  const TwoPointSolution hom = solve_two_point(LaminateCoefficient::constant(a_star), f);
  rep.total_energy_limit = hom.energy();
  rep.total_energy.label = "F_n(u_n)";
  rep.l2_error.label = "||u_n - u||";
  rep.gradient_l2_error.label = "||u_n' - u'||";
  for (std::size_t t = 0; t < tests.size(); ++t) {
    const Load& psi = tests[t];
    rep.flux.push_back(PairingTable{"flux x psi" + std::to_string(t), {}, {}, 10});
    rep.energy.push_back(PairingTable{"energy x psi" + std::to_string(t), {}, {}, 10});
    rep.flux_limit.push_back(hom.integrate([&](double x) { return hom.flux(x) * psi(x); }));
    rep.energy_limit.push_back(hom.integrate([&](double x) {
      const double d = hom.du(x);
      return a_star * d * d * psi(x);
    }));
  }

  for (const LaminateCoefficient& a : ladder) {
    const TwoPointSolution sol = solve_two_point(a, f);
    rep.sup_coefficient = std::max(rep.sup_coefficient, a.sup());
    for (std::size_t t = 0; t < tests.size(); ++t) {
      const Load& psi = tests[t];
      rep.flux[t].push(a.n, sol.integrate([&](double x) { return sol.flux(x) * psi(x); }));
      rep.energy[t].push(a.n, sol.integrate([&](double x) {
        return sol.flux(x) * sol.flux(x) / a(x) * psi(x);
      }));
    }
    rep.l2_error.push(a.n, std::sqrt(sol.integrate([&](double x) {
                      const double d = sol.u(x) - hom.u(x);
                      return d * d;
                    })));
    rep.gradient_l2_error.push(a.n, std::sqrt(sol.integrate([&](double x) {
                               const double d = sol.du(x) - hom.du(x);
                               return d * d;
                             })));
    const double e = sol.energy();
    rep.total_energy.push(a.n, e);
    rep.max_energy_identity_error =
        std::max(rep.max_energy_identity_error, std::abs(e - sol.load_work()));
    if (a.alpha * sol.gradient_l2_sq() > e * (1.0 + 1e-12)) rep.coercivity_holds = false;
    rep.max_boundary_residual = std::max(rep.max_boundary_residual, sol.boundary_residual());
  }
  for (std::size_t t = 0; t < tests.size(); ++t) {
    const double lim = rep.flux_limit[t];
    const double last = rep.flux[t].values.back();
    rep.final_flux_rel_error =
        std::max(rep.final_flux_rel_error, std::abs(last - lim) / std::max(std::abs(lim), 1e-300));
  }
  return rep;
}

BoundTrack coefficient_bound_track(const std::vector<LaminateCoefficient>& ladder, double rho) {
  if (ladder.size() < 2) throw Error(ErrorCode::InsufficientData, "need >= 2 ladder members");
  BoundTrack bt;
  bt.rho = rho;
  bt.norms.label = "||a_n||_{L^rho}";
  for (const auto& a : ladder) bt.norms.push(a.n, a.l_rho_norm(rho));
  const std::size_t m = ladder.size();
  const std::size_t k = std::max<std::size_t>(2, (m + 1) / 2);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = m - k; i < m; ++i) {
    const double x = std::log(static_cast<double>(bt.norms.n[i]));
    const double y = std::log(bt.norms.values[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double kk = static_cast<double>(k);
  bt.log_slope = (kk * sxy - sx * sy) / (kk * sxx - sx * sx);
  bt.bounded = bt.log_slope < 0.05;
  return bt;
}

}  // namespace divcurl
