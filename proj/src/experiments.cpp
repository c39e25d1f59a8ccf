#include "divcurl/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <thread>

#include "divcurl/homog1d.hpp"
#include "divcurl/jacobian.hpp"
#include "divcurl/lorentz.hpp"
#include "divcurl/selection.hpp"
#include "divcurl/sequences.hpp"

namespace divcurl {

namespace {

using json = nlohmann::ordered_json;
constexpr double kPi = std::numbers::pi;

Check abs_check(std::string name, double value, double ref, double tol, bool required = true) {
  return {std::move(name), value, ref, tol, std::abs(value - ref) <= tol, required};
}

Check rel_check(std::string name, double value, double ref, double tol, bool required = true) {
  return {std::move(name), value, ref, tol, std::abs(value - ref) <= tol * std::abs(ref), required};
}

Check upper_check(std::string name, double value, double bound, bool required = true) {
  return {std::move(name), value, bound, 0.0, value <= bound, required};
}

Check lower_check(std::string name, double value, double bound, bool required = true) {
  return {std::move(name), value, bound, 0.0, value >= bound, required};
}

Check flag_check(std::string name, bool ok, bool required = true) {
  return {std::move(name), ok ? 1.0 : 0.0, 1.0, 0.0, ok, required};
}

/// Evaluates fn(i) for i < count on `threads` workers; results by index.
template <class T>
std::vector<T> parallel_map(std::size_t count, int threads, const std::function<T(std::size_t)>& fn) {
  std::vector<T> out(count);
  const int workers = std::max(1, std::min<int>(threads, static_cast<int>(count)));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) out[i] = fn(i);
    return out;
  }
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
  {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t i = static_cast<std::size_t>(w); i < count;
               i += static_cast<std::size_t>(workers)) {
            out[i] = fn(i);
          }
        } catch (...) {
          errors[static_cast<std::size_t>(w)] = std::current_exception();
        }
      });
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

std::vector<TestFunction> as_tests(const std::vector<CylinderTestFunction>& family) {
  std::vector<TestFunction> t;
  for (const auto& f : family) t.push_back(f.as_test());
  return t;
}

bool strictly_decreasing_tail(const std::vector<double>& v) {
  const std::size_t start = v.size() / 2;
  for (std::size_t i = start + 1; i < v.size(); ++i) {
    if (!(v[i] < v[i - 1])) return false;
  }
  return true;
}

/// 2 int_0^1 g(t) dt by Gauss panels graded toward t = 0.
double segment_oracle(const std::function<double(double)>& g) {
  const RadialGrid grid = RadialGrid::geometric(0.0, 1.0, 40, 0.5, Grading::GeometricToLow, 20);
  const GaussRule rule = grid.rule();
  double s = 0.0;
  for (Eigen::Index i = 0; i < rule.nodes.size(); ++i) s += rule.weights[i] * g(rule.nodes[i]);
  return 2.0 * s;
}

void set_table(Report& r, const PairingTable& t) {
  r.table.clear();
  for (std::size_t i = 0; i < t.size(); ++i) r.table.emplace_back(t.n[i], t.values[i]);
}

VectorField potential_as_map(const ScalarField& phi) {
  const int dim = phi.dim();
  return VectorField(
      phi.domain(), 1, [phi](const Point& x) -> Values { return Values::Constant(1, phi(x)); },
      [phi, dim](const Point& x) -> Matrix {
        Matrix j(1, dim);
        j.row(0) = phi.gradient(x).transpose();
        return j;
      },
      phi.singular_set());
}

// ---------------------------------------------------------------------------

void exp_beta(const ExperimentConfig& c, Report& r) {
  std::vector<std::pair<int, double>> pairs;
  if (c.k || c.alpha) {
    pairs.emplace_back(c.k.value_or(0), c.alpha.value_or(1.0));
  } else {
    pairs = {{0, 1.0}, {1, 2.0}, {2, 1.0}};
  }
  const std::vector<int> ladder = doubling_ladder(16, std::max(4096, c.n_max));
  r.params["pairs"] = json::array();
  for (const auto& [k, alpha] : pairs) r.params["pairs"].push_back({{"k", k}, {"alpha", alpha}});
  r.params["ladder"] = ladder;

  bool first = true;
  for (const auto& [k, alpha] : pairs) {
    const double limit = BetaAsymptotic{k, alpha, 1}.limit();
    const double bound = limit * (k + 1.0) * (k + 2.0) / (2.0 * alpha);
    PairingTable t;
    double worst = 0.0;
    for (int n : ladder) {
      const double v = beta_asymptotic_value({k, alpha, n});
      t.push(n, v);
      worst = std::max(worst, n * std::abs(v - limit));
    }
    const std::string tag = "(k=" + std::to_string(k) + ", alpha=" + json(alpha).dump() + ")";
    const double last = t.values.back();
    r.checks.push_back(upper_check("n |value - limit| <= C " + tag, worst, bound));
    r.checks.push_back(upper_check("relative error at n = " + std::to_string(ladder.back()) + " " + tag,
                                   std::abs(last - limit) / limit, 1e-3));
    const LimitEstimate est = limit_extrapolate(t);
    r.checks.push_back(rel_check("extrapolated limit " + tag, est.value, limit, 1e-6, k == 0 && alpha == 1.0));
    if (first) {
      set_table(r, t);
      r.extrapolated = est;
      r.reference = limit;
      r.provenance = "PAPER";
      first = false;
    }
  }
  r.notes.push_back("C(k, alpha) = k!/alpha^{k+1} (k+1)(k+2)/(2 alpha) bounds n |error|.");
}

void exp_divcurl_concentration(const ExperimentConfig& c, Report& r) {
  const int dim = c.dim;
  const double p = c.p.value_or(1.0);
  const std::vector<int> ladder = doubling_ladder(8, c.n_max);
  const auto family = CylinderTestFunction::standard_family();
  const auto tests = as_tests(family);
  const Cubature cub = axis_graded_cubature(dim, 32, c.quad_order, 16, 8);
  r.params["dim"] = dim;
  r.params["p"] = p;
  r.params["ladder"] = ladder;
  r.params["quad_order"] = c.quad_order;
  r.params["cubature_points"] = cub.size();

  struct Row {
    std::vector<double> pairings;
    double offaxis = 0;
  };
  const auto rows = parallel_map<Row>(ladder.size(), c.threads, [&](std::size_t i) {
    const int n = ladder[i];
    const CounterexamplePair pr = counterexample_fields(dim, p, n);
    const ScalarField f(pr.sigma.domain(), [pr](const Point& x) {
      return pr.sigma(x).dot(pr.eta(x));
    });
    Row row;
    for (const auto& t : tests) row.pairings.push_back(pair(f, t, cub));
    row.offaxis = offaxis_sup(f, 1.0 / std::sqrt(static_cast<double>(n)));
    return row;
  });

  std::vector<PairingTable> tables(family.size());
  PairingTable offaxis;
  for (std::size_t i = 0; i < ladder.size(); ++i) {
    for (std::size_t t = 0; t < family.size(); ++t) tables[t].push(ladder[i], rows[i].pairings[t]);
    offaxis.push(ladder[i], rows[i].offaxis);
  }
  const bool vanishing = offaxis.values.back() <= 1e-6 && strictly_decreasing_tail(offaxis.values);
  const ConcentrationEstimate est = concentration_coefficient(tables, family, vanishing);

  PairingTable normalized;
  const double norm0 = family[0].chi_at_axis() * family[0].g_integral();
  for (std::size_t i = 0; i < ladder.size(); ++i) normalized.push(ladder[i], tables[0].values[i] / norm0);
  set_table(r, normalized);
  LimitEstimate lim = limit_extrapolate(normalized);
  lim.value = est.mean;
  r.extrapolated = lim;

  double reference = 0.0;
  if (dim == 3) {
    reference = 2.0 * kPi / 4.0;
    r.provenance = "PAPER";
  } else {
    PairingTable oracle;
    for (int n : ladder) {
      oracle.push(n, segment_oracle([n](double t) { return n * std::pow(1.0 - t, 2 * n); }));
    }
    reference = limit_extrapolate(oracle).value;
    r.provenance = "DERIVED";
    r.notes.push_back("N = 2 reference: extrapolated 1-D segment oracle int_{-1}^{1} n(1-|t|)^{2n} dt; "
                      "the |S_0| = 1 polar convention gives half of it (" +
                      json(reference / 2.0).dump() + ").");
  }
  r.reference = reference;
  r.checks.push_back(rel_check("concentration coefficient", est.mean, reference, 0.02));
  r.checks.push_back(upper_check("family relative spread", est.relative_spread, 0.05));
  r.checks.push_back(flag_check("pointwise limit vanishes off the axis", vanishing));
  r.checks.push_back(upper_check("sup |f_n| over |x'| >= n^{-1/2} at n_max", offaxis.values.back(), 1e-6));
  for (std::size_t t = 0; t < family.size(); ++t) {
    r.checks.push_back(rel_check("coefficient from " + family[t].label, est.coefficients[t],
                                 reference, 0.02, false));
  }
  r.params["offaxis_sup"] = offaxis.values;
}

void exp_divcurl_weak_null(const ExperimentConfig& c, Report& r) {
  const int dim = c.dim;
  const double p = c.p.value_or(dim == 3 ? 1.5 : 1.0);
  const double q = c.q.value_or(critical_q(dim, p));
  // Pairings decay like n^{-(N-1)(1-1/p)} with O(1/n) corrections; an absolute
  // 1e-3 limit needs the ladder to reach well beyond the 2% regime.
  const std::vector<int> ladder = doubling_ladder(8, std::max(c.n_max, 8192));
  const auto family = CylinderTestFunction::standard_family();
  const auto tests = as_tests(family);
  const Cubature cub = axis_graded_cubature(dim, 32, c.quad_order, 16, 8);
  r.params["dim"] = dim;
  r.params["p"] = p;
  r.params["q"] = q;
  r.params["ladder"] = ladder;
  r.params["pqN_sum"] = 1.0 / p + 1.0 / q;
  r.params["critical_sum"] = 1.0 + 1.0 / (dim - 1.0);
  constexpr double kTol = 1e-3;

  const WeakNullReport sig = weak_null_check(
      ladder, [&](int n) { return counterexample_fields(dim, p, n).sigma; }, tests, cub, p, kTol);
  const WeakNullReport eta = weak_null_check(
      ladder, [&](int n) { return counterexample_fields(dim, p, n).eta; }, tests, cub, q, kTol);

  std::vector<PairingTable> prod(family.size());
  for (int n : ladder) {
    const CounterexamplePair pr = counterexample_fields(dim, p, n);
    const ScalarField f(pr.sigma.domain(), [pr](const Point& x) {
      return pr.sigma(x).dot(pr.eta(x));
    });
    for (std::size_t t = 0; t < tests.size(); ++t) prod[t].push(n, pair(f, tests[t], cub));
  }
  double prod_max = 0.0;
  for (const auto& t : prod) prod_max = std::max(prod_max, std::abs(limit_extrapolate(t).value));

  set_table(r, prod[0]);
  r.extrapolated = limit_extrapolate(prod[0]);
  r.reference = 0.0;
  r.provenance = "TRIVIAL";
  r.checks.push_back(abs_check("sigma_n pairings extrapolate to 0", sig.max_abs_limit, 0.0, kTol));
  r.checks.push_back(abs_check("eta_n pairings extrapolate to 0", eta.max_abs_limit, 0.0, kTol));
  r.checks.push_back(abs_check("sigma_n . eta_n pairings extrapolate to 0", prod_max, 0.0, kTol));
  r.checks.push_back(flag_check("||sigma_n||_{L^p} bounded", sig.norms_bounded));
  r.checks.push_back(flag_check("||eta_n||_{L^q} bounded", eta.norms_bounded));
  const double norm0 = family[0].chi_at_axis() * family[0].g_integral();
  const double conc = dim == 3 ? kPi / 2.0 : 1.0;
  r.checks.push_back(rel_check("sigma_n . eta_n coefficient (concentration reading)",
                               r.extrapolated->value / norm0, conc, 0.02, false));
  r.params["sigma_norms"] = sig.norms.values;
  r.params["eta_norms"] = eta.norms.values;
  r.params["sigma_norm_log_slope"] = sig.norm_log_slope;
  r.params["eta_norm_log_slope"] = eta.norm_log_slope;
  r.notes.push_back("sigma_n . eta_n = n^{N-1}(1-r)^{2n} for every p, and 1/p + 1/q equals "
                    "1 + 1/(N-1) by construction, so the product keeps concentrating on the axis.");
}

void exp_structure_residuals(const ExperimentConfig& c, Report& r) {
  const int dim = c.dim;
  std::vector<double> ps;
  if (c.p) {
    ps = {*c.p};
  } else if (dim == 3) {
    ps = {1.0, 1.5, 2.0};
  } else {
    ps = {1.0};
  }
  const std::vector<int> ladder = doubling_ladder(8, c.n_max);
  const auto cloud = interior_cloud(dim, 1000, c.seed);
  r.params["dim"] = dim;
  r.params["p"] = ps;
  r.params["ladder"] = ladder;
  r.params["samples"] = cloud.size();
  r.params["fd_step"] = default_fd_step(sequence_domain(dim));

  const auto reps = parallel_map<std::vector<StructureReport>>(
      ladder.size(), c.threads, [&](std::size_t i) {
        std::vector<StructureReport> out;
        for (double p : ps) out.push_back(verify_structure(counterexample_fields(dim, p, ladder[i]), 1e-6, cloud));
        return out;
      });
  double div = 0, curl = 0, mism = 0;
  for (std::size_t i = 0; i < ladder.size(); ++i) {
    double row = 0.0;
    for (const auto& s : reps[i]) {
      div = std::max(div, s.div_sigma);
      curl = std::max(curl, s.curl_eta);
      mism = std::max(mism, s.gradient_mismatch);
      row = std::max({row, s.div_sigma, s.curl_eta});
    }
    r.table.emplace_back(ladder[i], row);
  }
  r.reference = 0.0;
  r.provenance = "TRIVIAL";
  r.checks.push_back(upper_check("max FD |div sigma_n|", div, 1e-6));
  r.checks.push_back(upper_check("max FD |curl eta_n|", curl, 1e-6));
  r.checks.push_back(upper_check("max |eta_n - grad potential|", mism, 1e-12));

  const CounterexamplePair pr = counterexample_fields(dim, ps.front(), ladder.front());
  const double h = default_fd_step(pr.sigma.domain());
  const VectorField bad_div = add_divergence(pr.sigma);
  const VectorField bad_curl = add_curl(pr.eta);
  double div_ctrl = 0, curl_ctrl = 0;
  for (const Point& x : cloud) {
    div_ctrl = std::max(div_ctrl, std::abs(divergence_residual(bad_div, x, h) - 1.0));
    curl_ctrl = std::max(curl_ctrl, std::abs(curl_residual(bad_curl, x, h) - 1.0));
  }
  r.checks.push_back(upper_check("control sigma + x1 e1: max |div - 1|", div_ctrl, 1e-6));
  r.checks.push_back(upper_check("control eta + x1 e2: max |curl - 1|", curl_ctrl, 1e-6));
}

void exp_equi_integrability(const ExperimentConfig& c, Report& r) {
  const int dim = c.dim;
  const double p_crit = c.p.value_or(dim - 1.0);
  const std::vector<int> ladder = doubling_ladder(8, c.n_max);
  const Cubature cub = axis_graded_cubature(dim, 32, c.quad_order, 16, 8);
  r.params["dim"] = dim;
  r.params["p_critical"] = p_crit;
  r.params["ladder"] = ladder;

  auto modulus = [&](double p, double eta_p, int n) {
    const CounterexamplePair pr = counterexample_fields(dim, eta_p, n);
    WeightedSamples s;
    for (Eigen::Index j = 0; j < cub.size(); ++j) {
      s.add(std::pow(pr.eta(cub.point(j)).norm(), p), cub.weights[j]);
    }
    const double delta = dim == 3 ? kPi * std::pow(2.0 / n, 2) : 4.0 / n;
    return equiintegrability_modulus(s, delta, ModulusMode::l1());
  };

  PairingTable crit;
  for (int n : ladder) crit.push(n, modulus(p_crit, p_crit, n));
  set_table(r, crit);
  const double min_crit = *std::min_element(crit.values.begin(), crit.values.end());
  r.checks.push_back(lower_check("critical pair: min_n modulus of |eta_n|^p at delta_n", min_crit, 0.1));
  r.reference = 0.1;
  r.provenance = "DERIVED";

  if (dim == 3) {
    PairingTable mid;
    for (int n : ladder) mid.push(n, modulus(1.5, 1.5, n));
    const bool decreasing = strictly_decreasing_tail(mid.values);
    const double ratio = mid.values.back() / mid.values.front();
    Check chk{"p = 3/2: modulus of |eta_n|^p at delta_n tends to 0", mid.values.back(), 0.0,
              0.1 * mid.values.front(), decreasing && ratio < 0.1, true};
    r.checks.push_back(chk);
    r.params["p=1.5 moduli"] = mid.values;

    PairingTable one;
    for (int n : ladder) one.push(n, modulus(1.0, 1.0, n));
    r.checks.push_back(abs_check("p = 1 (info): modulus of |eta_n| at n_max", one.values.back(), 0.0,
                                 1e-2, false));
    r.params["p=1 moduli"] = one.values;
    r.notes.push_back("1/p + 1/q = 1 + 1/(N-1) holds for p = 3/2 as well, so it is a critical "
                      "pair and |eta_n|^{3/2} concentrates like the endpoint case.");
  }
}

void exp_selection(const ExperimentConfig& c, Report& r) {
  const int dim = c.dim;
  const double q = c.q.value_or(critical_q(dim, 1.0));
  std::vector<double> lambdas = c.lambda ? std::vector<double>{*c.lambda}
                                         : std::vector<double>{1.0, 10.0, 100.0};
  const std::vector<int> ladder = doubling_ladder(8, std::min(c.n_max, 256));
  const double r0 = 0.25, r1 = 0.75;
  Point x0 = Point::Zero(dim);
  x0[dim - 1] = 0.5;
  const RadialGrid grid = RadialGrid::uniform(r0, r1, 20, 8);
  const SphereQuad quad = sphere_quadrature(dim, dim == 3 ? 4 * c.quad_order : 32 * c.quad_order);
  r.params["dim"] = dim;
  r.params["q"] = q;
  r.params["s"] = 2.0;
  r.params["lambda"] = lambdas;
  r.params["ladder"] = ladder;
  r.params["annulus"] = {r0, r1};
  r.params["sphere_nodes"] = quad.size();

  const VectorField zero(sequence_domain(dim), 1,
                         [](const Point&) -> Values { return Values::Zero(1); },
                         [dim](const Point&) -> Matrix { return Matrix::Zero(1, dim); });
  SelectionConfig base;
  base.q = q;
  base.base = IntervalSet::single(r0, r1);
  base.norm_kind = NormKind::Lq;

  std::vector<std::vector<double>> trace(lambdas.size());
  std::vector<std::vector<bool>> nonempty(lambdas.size());
  std::vector<double> worst_ratio(lambdas.size(), 0.0);
  std::vector<bool> bound_ok(lambdas.size(), true);
  for (int n : ladder) {
    const VectorField un = potential_as_map(counterexample_fields(dim, 1.0, n).potential);
    const GradientProfile prof = gradient_sphere_profile(un, zero, base, x0, grid, quad);
    for (std::size_t l = 0; l < lambdas.size(); ++l) {
      SelectionConfig cfg = base;
      cfg.lambda = lambdas[l];
      const SelectionResult res = select_good_radii(prof, cfg);
      bound_ok[l] = bound_ok[l] && res.bound_holds;
      if (res.bound_rhs > 0.0) {
        worst_ratio[l] = std::max(worst_ratio[l], res.measure_removed / res.bound_rhs);
      }
      nonempty[l].push_back(!res.selected.empty());
      trace[l].push_back(trace_convergence_sup(un, zero, res, TraceNorm::ls(2.0), x0, quad, cfg));
    }
  }
  for (std::size_t l = 0; l < lambdas.size(); ++l) {
    const std::string tag = " (lambda = " + json(lambdas[l]).dump() + ")";
    r.checks.push_back({"(a) |U \\ U_n| / bound, max over n" + tag, worst_ratio[l], 1.0, 0.0,
                        bound_ok[l] && worst_ratio[l] <= 1.0, true});
    int violations = 0;
    int compared = 0;
    for (std::size_t i = 1; i < ladder.size(); ++i) {
      if (nonempty[l][i] && nonempty[l][i - 1]) {
        ++compared;
        if (!(trace[l][i] < trace[l][i - 1])) ++violations;
      }
    }
    r.checks.push_back({"(b) trace sup strictly decreasing, violations" + tag, double(violations),
                        0.0, 0.0, violations == 0, true});
    if (compared == 0) {
      r.notes.push_back("U_n empty for consecutive n at" + tag + "; (b) holds vacuously there.");
    }
    r.params["trace_sup" + tag] = trace[l];
  }
  for (std::size_t i = 0; i < ladder.size(); ++i) r.table.emplace_back(ladder[i], trace.back()[i]);
  r.reference = 0.0;
  r.provenance = "DERIVED";
}

void exp_radial_flux(const ExperimentConfig& c, Report& r) {
  const int dim = c.dim;
  const double R = 0.45;
  Point xc = Point::Zero(dim);
  xc[0] = 0.1;
  xc[dim - 1] = 0.5;
  const RadialGrid grid = RadialGrid::uniform(0.0, R, 8, c.quad_order);
  const SphereQuad quad = sphere_quadrature(dim, 64);
  r.params["dim"] = dim;
  r.params["R"] = R;
  r.params["sphere_order"] = 64;

  const std::vector<int> ladder = doubling_ladder(8, c.n_max);
  double worst_seq = 0.0;
  double worst_mod = 0.0;
  for (int n : ladder) {
    const RadialFluxProfile h =
        radial_flux_profile(counterexample_fields(dim, 1.0, n).sigma, xc, R, grid, quad);
    r.table.emplace_back(n, h.max_abs());
    worst_seq = std::max(worst_seq, h.max_abs());
    if (h.samples.total_measure() > 0.0) {
      worst_mod = std::max(worst_mod, equiintegrability_modulus(h.samples, 0.01, ModulusMode::l1()));
    }
  }
  r.checks.push_back(upper_check("max |h| for sigma_n ladder", worst_seq, 1e-8));
  r.checks.push_back(upper_check("L1 modulus of h_n at delta = 0.01 (info)", worst_mod, 1e-8, false));

  const Domain whole = Domain::whole(dim);
  std::vector<std::pair<std::string, VectorField>> solenoidal;
  solenoidal.emplace_back("rotation", VectorField(whole, dim, [dim](const Point& x) -> Values {
                            Values v = Values::Zero(dim);
                            v[0] = -x[1];
                            v[1] = x[0];
                            return v;
                          }));
  solenoidal.emplace_back("constant", VectorField(whole, dim, [dim](const Point&) -> Values {
                            Values v = Values::Constant(dim, 1.0);
                            v[0] = 2.0;
                            return v;
                          }));
  if (dim == 3) {
    solenoidal.emplace_back("(x2 x3, x1 x3, -2 x1 x2)", VectorField(whole, 3, [](const Point& x) -> Values {
                              Values v(3);
                              v << x[1] * x[2], x[0] * x[2], -2.0 * x[0] * x[1];
                              return v;
                            }));
  }
  for (const auto& [name, f] : solenoidal) {
    r.checks.push_back(upper_check("max |h| for " + name,
                                   radial_flux_profile(f, xc, R, grid, quad).max_abs(), 1e-8));
  }

  const Point origin = Point::Zero(dim);
  const double omega = dim == 3 ? 4.0 * kPi : 2.0 * kPi;
  const VectorField id(whole, dim, [](const Point& x) -> Values { return x; });
  const ScalarField half_sq(
      whole, [](const Point& x) { return 0.5 * x.squaredNorm(); },
      [](const Point& x) -> Point { return x; });
  const std::vector<std::pair<std::string, VectorField>> radial = {
      {"f(x) = x", id}, {"f = grad(|x|^2/2)", gradient_field(half_sq)}};
  for (const auto& [name, f] : radial) {
    const RadialFluxProfile h = radial_flux_profile(f, origin, R, grid, quad);
    double err = 0.0;
    for (std::size_t i = 0; i < h.radii.size(); ++i) {
      err = std::max(err, std::abs(h.values[i] - omega * std::pow(h.radii[i], dim)));
    }
    r.checks.push_back(upper_check("max |h - |S_{N-1}| r^N| for " + name, err, 1e-8));
  }
  r.reference = 0.0;
  r.provenance = "TRIVIAL";
}

void exp_lorentz(const ExperimentConfig& c, Report& r) {
  std::mt19937_64 rng(c.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double worst = 0.0;
  double worst_scaled = 0.0;
  int indicator_mismatch = 0;
  int equimeasure_mismatch = 0;
  int l11_mismatch = 0;
  for (int i = 0; i < 100; ++i) {
    const int cells = 1 + static_cast<int>(unit(rng) * 40.0);
    WeightedSamples s;
    double prev = 1.0;
    for (int j = 0; j < cells; ++j) {
      const double u = unit(rng);
      double v = u < 0.3 ? prev : (u < 0.4 ? 0.0 : 10.0 * unit(rng));
      s.add(v, 0.01 + 2.0 * unit(rng));
      prev = v;
    }
    const double p = 1.05 + 5.0 * unit(rng);
    const double a = lorentz_norm(s, p);
    const double b = lorentz_norm_from_rearrangement(s, p);
    const double rel = a == b ? 0.0 : std::abs(a - b) / std::max(std::abs(a), 1e-300);
    worst = std::max(worst, rel);
    r.table.emplace_back(i, rel);
    const double bp = b / p;
    worst_scaled = std::max(worst_scaled, a == bp ? 0.0 : std::abs(a - bp) / std::max(std::abs(a), 1e-300));

    WeightedSamples ind;
    for (int j = 0; j < cells; ++j) ind.add(1.0, s.weights()[static_cast<std::size_t>(j)]);
    if (lorentz_norm(ind, p) != std::pow(ind.total_measure(), 1.0 / p)) ++indicator_mismatch;
    if (!(distribution_function(rearrangement(s)) == distribution_function(s))) ++equimeasure_mismatch;
    if (lorentz_norm_dim(s, 2) != l1_norm(s)) ++l11_mismatch;
  }
  r.params["functions"] = 100;
  r.reference = 0.0;
  r.provenance = "TRIVIAL";
  r.checks.push_back(upper_check("max relative gap between the two norm formulas", worst, 1e-10));
  r.checks.push_back(upper_check("max relative gap with the t-integral divided by p (info)", worst_scaled, 1e-10, false));
  r.notes.push_back("int t^{1/p - 1} f*(t) dt equals p int d(lambda)^{1/p} dlambda; the two "
                    "formulas differ by the factor p unless the t-integral is normalized by 1/p.");
  r.checks.push_back(abs_check("indicator norm != |E|^{1/p} (count)", indicator_mismatch, 0, 0));
  r.checks.push_back(abs_check("rearrangement not equimeasurable (count)", equimeasure_mismatch, 0, 0));
  r.checks.push_back(abs_check("L^{1,1} != L^1 for N = 2 (count)", l11_mismatch, 0, 0));
}

std::vector<TestFunction> bump_family(int dim) {
  Point c1 = Point::Zero(dim), c2 = Point::Zero(dim);
  c1[0] = 0.1;
  c1[1] = 0.2;
  c2[0] = -0.2;
  c2[1] = 0.05;
  if (dim == 3) {
    c1[2] = -0.1;
    c2[2] = 0.3;
  }
  return {RadialTestFunction::bump(c1, 0.7, 4).as_test(), RadialTestFunction::bump(c2, 0.5, 3).as_test()};
}

std::vector<Point> box_cloud(int dim, std::size_t count, std::uint64_t seed, double half) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-half, half);
  std::vector<Point> cloud;
  for (std::size_t i = 0; i < count; ++i) {
    Point x(dim);
    for (int k = 0; k < dim; ++k) x[k] = u(rng);
    cloud.push_back(x);
  }
  return cloud;
}

void exp_jacobian_consistency(const ExperimentConfig& c, Report& r) {
  const auto maps = polynomial_test_maps();
  double worst_rel = 0.0;
  int idx = 0;
  for (const auto& m : maps) {
    const int dim = m.map.dim();
    double rel = 0.0;
    Point centers[2];
    const auto fam = bump_family(dim);
    std::vector<RadialTestFunction> raw;
    {
      Point c1 = Point::Zero(dim), c2 = Point::Zero(dim);
      c1[0] = 0.1;
      c1[1] = 0.2;
      c2[0] = -0.2;
      c2[1] = 0.05;
      if (dim == 3) {
        c1[2] = -0.1;
        c2[2] = 0.3;
      }
      raw = {RadialTestFunction::bump(c1, 0.7, 4), RadialTestFunction::bump(c2, 0.5, 3)};
    }
    (void)centers;
    for (std::size_t t = 0; t < fam.size(); ++t) {
      const Cubature cub = ball_cubature(raw[t], 4, 12, 24);
      const DetConsistencyReport rep = det_consistency(m.map, {fam[t]}, cub, 1e-6);
      rel = std::max(rel, rep.max_rel_diff);
    }
    r.checks.push_back(upper_check("relative |Det - det| pairing gap for " + m.name, rel, 1e-6));
    r.table.emplace_back(idx++, rel);
    worst_rel = std::max(worst_rel, rel);
  }

  // Cofactor identities on random matrices.
  std::mt19937_64 rng(c.seed);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  double ident = 0.0, inv = 0.0;
  for (int i = 0; i < 200; ++i) {
    const int n = i % 2 == 0 ? 2 : 3;
    Matrix J(n, n);
    for (int a = 0; a < n; ++a) {
      for (int b = 0; b < n; ++b) J(a, b) = u(rng);
    }
    const Matrix C = cofactor(J);
    const double det = J.determinant();
    ident = std::max(ident, (C.transpose() * J - det * Matrix::Identity(n, n)).cwiseAbs().maxCoeff());
    if (std::abs(det) > 1e-3) {
      const Matrix ref = det * J.inverse().transpose();
      inv = std::max(inv, (C - ref).norm() / ref.norm());
    }
  }
  r.checks.push_back(upper_check("max |cof(J)^T J - det(J) I|", ident, 1e-12));
  r.checks.push_back(upper_check("max relative |cof(J) - det(J) J^{-T}|", inv, 1e-10));

  // Piola identity: rows of cof(Du) are divergence free.
  double lin = 0.0, poly = 0.0;
  for (const auto& m : maps) {
    const auto cloud = box_cloud(m.map.dim(), 200, c.seed, 0.5);
    const double res = piola_residual(m.map, cloud);
    if (m.name.find('^') == std::string::npos && m.name.find("x2 x3") == std::string::npos) {
      lin = std::max(lin, res);
    } else {
      poly = std::max(poly, res);
    }
  }
  r.checks.push_back(upper_check("Piola residual, linear map", lin, 1e-10));
  r.checks.push_back(upper_check("Piola residual, polynomial maps", poly, 1e-5));
  const auto axis_cloud = interior_cloud(3, 200, c.seed, 0.05, 0.95);
  const double ex = piola_residual(jacobian_example_field(3, 64), axis_cloud, 0.0, true);
  r.checks.push_back(upper_check("Piola residual, concentrating map n = 64 off the axis", ex, 1e-4));

  // Closed-form determinant of the concentrating map.
  double closed = 0.0, displayed = 0.0;
  for (int dim : {2, 3}) {
    const VectorField un = jacobian_example_field(dim, 64);
    for (const Point& x : interior_cloud(dim, 200, c.seed)) {
      const double rr = x.head(dim - 1).norm();
      const double det = un.jacobian(x).determinant();
      closed = std::max(closed, std::abs(det - jacobian_example_det(dim, 64, rr)));
      const double extra_r = std::pow(64.0, dim - 1) * std::pow(1.0 - rr, 64 * dim) -
                             std::pow(64.0, dim) * rr * std::pow(1.0 - rr, 64 * dim - 1) * rr;
      displayed = std::max(displayed, std::abs(det - extra_r));
    }
  }
  r.checks.push_back(upper_check("max |det(Du_n) - closed form| at n = 64", closed, 1e-8));
  r.checks.push_back(lower_check("reading with the duplicated factor r differs (info)", displayed, 1e-3, false));

  // Concentrating map at n = 64: divergence form vs pointwise determinant.
  {
    Point x0 = Point::Zero(3);
    x0[2] = 0.5;
    const RadialTestFunction psi = RadialTestFunction::bump(x0, 0.45, 4);
    CylinderRuleSpec spec{RadialGrid::geometric(0.0, 0.45, 24, 0.5, Grading::GeometricToLow, 16), 16, 8,
                          16, 0.05, 0.95};
    const Cubature cub = cylinder_cubature(3, spec);
    const VectorField un = jacobian_example_field(3, 64);
    const double d = distributional_det_pairing(un, psi.as_test(), cub);
    const double p = pointwise_det_pairing(un, psi.as_test(), cub);
    r.checks.push_back(upper_check("concentrating map n = 64: relative Det/det gap", std::abs(d - p) / std::abs(p), 0.01));
  }

  // Negative control: a jump in u^1.
  {
    const VectorField jm = jump_map(2, 0.1);
    const RadialTestFunction psi = RadialTestFunction::bump(Point::Zero(2), 0.7, 4);
    const DetConsistencyReport rep = det_consistency(jm, {psi.as_test()}, ball_cubature(psi, 16, 16, 256), 1e-6);
    r.checks.push_back(lower_check("jump control: |Det - det| gap is O(1)", rep.max_abs_diff, 0.05));
  }

  // Weak continuity for a smooth oscillating family with equi-integrable grad u_n^1.
  {
    const VectorField base = maps.front().map;
    Point xc(2);
    xc << 0.05, 0.1;
    const RadialTestFunction psi = RadialTestFunction::bump(xc, 0.6, 4);
    const Cubature cub = ball_cubature(psi, 24, 16, 256);
    const double rhs = distributional_det_pairing(base, psi.as_test(), cub);
    PairingTable t;
    double worst_mod = 0.0;
    WeightedSamples base_s;
    for (Eigen::Index j = 0; j < cub.size(); ++j) base_s.add(base.jacobian(cub.point(j)).row(0).norm(), cub.weights[j]);
    const double delta = 1e-3;
    const double base_mod = equiintegrability_modulus(base_s, delta, ModulusMode::l1());
    for (int n : doubling_ladder(8, 64)) {
      const VectorField un = oscillating_perturbation(base, n);
      t.push(n, pointwise_det_pairing(un, psi.as_test(), cub));
      WeightedSamples s;
      for (Eigen::Index j = 0; j < cub.size(); ++j) s.add(un.jacobian(cub.point(j)).row(0).norm(), cub.weights[j]);
      worst_mod = std::max(worst_mod, equiintegrability_modulus(s, delta, ModulusMode::l1()));
    }
    const LimitEstimate est = limit_extrapolate(t);
    r.checks.push_back(rel_check("oscillating family: extrapolated <det Du_n, psi> vs divergence form of u",
                                 est.value, rhs, 0.02));
    r.checks.push_back(upper_check("oscillating family: sup_n modulus of |grad u_n^1| / limit modulus",
                                   worst_mod / base_mod, 1.2));
    r.params["weak_continuity_table"] = t.values;
  }
  r.params["maps"] = maps.size();
  r.reference = 0.0;
  r.provenance = "DERIVED";
  (void)worst_rel;
}

void exp_jacobian_concentration(const ExperimentConfig& c, Report& r) {
  const int dim = c.dim;
  const std::vector<int> ladder = doubling_ladder(8, c.n_max);
  const auto family = CylinderTestFunction::standard_family();
  const auto tests = as_tests(family);
  const Cubature cub = axis_graded_cubature(dim, 32, c.quad_order, 16, 8);
  r.params["dim"] = dim;
  r.params["ladder"] = ladder;

  struct Row {
    std::vector<double> pairings;
    double offaxis = 0;
  };
  const auto rows = parallel_map<Row>(ladder.size(), c.threads, [&](std::size_t i) {
    const int n = ladder[i];
    const VectorField un = jacobian_example_field(dim, n);
    const ScalarField det(un.domain(), [un](const Point& x) { return un.jacobian(x).determinant(); });
    Row row;
    for (const auto& t : tests) row.pairings.push_back(pair(det, t, cub));
    row.offaxis = offaxis_sup(det, 1.0 / std::sqrt(static_cast<double>(n)));
    return row;
  });
  std::vector<PairingTable> tables(family.size());
  PairingTable offaxis;
  for (std::size_t i = 0; i < ladder.size(); ++i) {
    for (std::size_t t = 0; t < family.size(); ++t) tables[t].push(ladder[i], rows[i].pairings[t]);
    offaxis.push(ladder[i], rows[i].offaxis);
  }
  const bool vanishing = offaxis.values.back() <= 1e-6 && strictly_decreasing_tail(offaxis.values);
  const ConcentrationEstimate est = concentration_coefficient(tables, family, vanishing);
  PairingTable normalized;
  const double norm0 = family[0].chi_at_axis() * family[0].g_integral();
  for (std::size_t i = 0; i < ladder.size(); ++i) normalized.push(ladder[i], tables[0].values[i] / norm0);
  set_table(r, normalized);
  LimitEstimate lim = limit_extrapolate(normalized);
  lim.value = est.mean;
  r.extrapolated = lim;

  double reference = 0.0;
  if (dim == 3) {
    reference = 2.0 * kPi / 27.0;
    r.provenance = "PAPER";
  } else {
    PairingTable oracle;
    for (int n : ladder) oracle.push(n, segment_oracle([n](double t) { return jacobian_example_det(2, n, t); }));
    reference = limit_extrapolate(oracle).value;
    r.provenance = "DERIVED";
    r.notes.push_back("N = 2 reference: extrapolated 1-D segment oracle; the |S_0| = 1 convention gives " +
                      json(reference / 2.0).dump() + ".");
  }
  r.reference = reference;
  r.checks.push_back(rel_check("Jacobian concentration coefficient", est.mean, reference, 0.02));
  r.checks.push_back(upper_check("family relative spread", est.relative_spread, 0.05));
  r.checks.push_back(flag_check("pointwise det vanishes off the axis", vanishing));

  const double sup = jacobian_example_sup(10000, SupComponent::Tangential);
  r.checks.push_back(abs_check("sup_r n r (1-r)^n at n = 10^4", sup, std::exp(-1.0), 1e-3));
  r.checks.push_back(abs_check("sup |u_n| including x_N (info)", jacobian_example_sup(10000, SupComponent::Full),
                               1.0, 1e-9, false));
  const WeakNullReport wn = weak_null_check(
      ladder, [dim](int n) { return jacobian_example_field(dim, n); }, tests, cub, 2.0, 1e-3);
  r.checks.push_back(abs_check("component pairings of u_n extrapolate to 0", wn.max_abs_limit, 0.0, 1e-3));
  r.params["offaxis_sup"] = offaxis.values;
}

void exp_homog(const ExperimentConfig& c, Report& r) {
  const std::vector<int> ladder = doubling_ladder(8, c.n_max);
  const Load f = [](double) { return 1.0; };
  const std::vector<Load> tests = {
      [](double x) { return x * x * (1.0 - x); },
      [](double x) { return x * std::sin(kPi * x); },
      [](double x) { return std::pow(std::sin(kPi * x), 2) * (1.0 + x); },
  };
  std::vector<LaminateCoefficient> lam, stiff;
  for (int n : ladder) {
    lam.push_back(LaminateCoefficient::two_phase(n, 1.0, 4.0));
    stiff.push_back(LaminateCoefficient::stiff_inclusion(n));
  }
  const double a_star = effective_coefficient(lam.front());
  r.params["ladder"] = ladder;
  r.params["laminate"] = {1.0, 4.0};
  r.params["rho"] = c.rho;

  const HLimitReport hl = flux_convergence_test(lam, a_star, f, tests);
  const HLimitReport hs = flux_convergence_test(stiff, 1.0, f, tests);

  set_table(r, hl.flux[0]);
  r.extrapolated = limit_extrapolate(hl.flux[0]);
  r.reference = hl.flux_limit[0];
  r.provenance = "DERIVED";
  r.checks.push_back(rel_check("effective coefficient of {1,4}", a_star, 1.6, 1e-14));
  auto extrapolated_error = [](const HLimitReport& h) {
    double e = 0.0;
    for (std::size_t t = 0; t < h.flux.size(); ++t) {
      e = std::max(e, std::abs(limit_extrapolate(h.flux[t]).value - h.flux_limit[t]) / std::abs(h.flux_limit[t]));
    }
    return e;
  };
  r.checks.push_back(upper_check("laminate extrapolated flux pairings, max relative error", extrapolated_error(hl), 0.01));
  r.checks.push_back(upper_check("stiff-inclusion extrapolated flux pairings, max relative error", extrapolated_error(hs), 0.02));
  r.checks.push_back(upper_check("laminate raw flux pairing relative error at n_max (info)", hl.final_flux_rel_error, 0.01, false));
  r.checks.push_back(upper_check("stiff-inclusion raw flux pairing relative error at n_max (info)", hs.final_flux_rel_error, 0.02, false));
  r.checks.push_back(upper_check("energy identity error", std::max(hl.max_energy_identity_error,
                                                                   hs.max_energy_identity_error), 1e-10));
  r.checks.push_back(flag_check("coercivity holds every solve", hl.coercivity_holds && hs.coercivity_holds));
  r.checks.push_back(upper_check("boundary residual", std::max(hl.max_boundary_residual, hs.max_boundary_residual), 1e-12));
  r.checks.push_back(rel_check("laminate energy F_n(u_n) limit", limit_extrapolate(hl.total_energy).value,
                               hl.total_energy_limit, 0.02));
  r.checks.push_back(upper_check("laminate ||u_n - u||_{L^2} decay ratio", hl.l2_error.values.back() / hl.l2_error.values.front(), 0.1));
  r.checks.push_back(lower_check("laminate ||u_n' - u'||_{L^2} persists (ratio)",
                                 hl.gradient_l2_error.values.back() / hl.gradient_l2_error.values.front(), 0.5));
  double l1max = 0.0;
  for (const auto& a : stiff) l1max = std::max(l1max, a.l_rho_norm(1.0));
  r.checks.push_back(upper_check("stiff-inclusion max ||a_n||_{L^1}", l1max, 2.0));
  r.checks.push_back(lower_check("stiff-inclusion sup a_n (non-equi-bounded)", hs.sup_coefficient, ladder.back()));
  const BoundTrack b1 = coefficient_bound_track(stiff, c.rho);
  const BoundTrack b2 = coefficient_bound_track(stiff, 2.0);
  r.checks.push_back(flag_check("stiff-inclusion ||a_n||_{L^rho} verdict matches rho <= 1", b1.bounded == (c.rho <= 1.0)));
  r.checks.push_back(flag_check("stiff-inclusion ||a_n||_{L^2} flagged unbounded", !b2.bounded));
  r.params["stiff_flux_table"] = hs.flux[0].values;
  r.params["stiff_flux_limit"] = hs.flux_limit[0];
  r.params["laminate_l2_error"] = hl.l2_error.values;
  r.params["laminate_gradient_error"] = hl.gradient_l2_error.values;
  r.notes.push_back("One-dimensional bench: a* is the harmonic mean of the cell values.");
}

void exp_cap(const ExperimentConfig& c, Report& r) {
  const int dim = c.dim;
  const SphereQuad quad = sphere_quadrature(dim, dim == 3 ? 4 * c.quad_order : 16 * c.quad_order);
  const double spacing = quad.equator_spacing();
  r.params["dim"] = dim;
  r.params["sphere_nodes"] = quad.size();
  r.params["equator_spacing"] = spacing;
  const std::vector<double> hs = {0.1, 0.3, 0.5, 1.0, 1.5};
  Point e1 = Point::Zero(dim);
  e1[0] = 1.0;
  double worst = 0.0;
  int idx = 0;
  const std::vector<std::pair<std::string, Point>> centers = {{"e1", e1}, {"node 0", quad.node(0)}};
  for (const auto& [where, y0] : centers) {
    for (double h : hs) {
      double ind = 0.0;
      for (Eigen::Index j = 0; j < quad.size(); ++j) {
        if ((quad.node(j) - y0).norm() < h) ind += quad.weights[j];
      }
      const double err = std::abs(ind - cap_area(h, dim));
      worst = std::max(worst, err);
      r.table.emplace_back(idx++, err);
      r.checks.push_back(upper_check("|indicator quadrature - cap_area| at h = " + json(h).dump() + ", centre " + where,
                                     err, 2.0 * spacing));
    }
  }

  // Constant density: T equals density * cap_area up to the same tolerance.
  const double density = 2.5;
  const SphereQuad coarse = sphere_quadrature(dim, dim == 3 ? 2 * c.quad_order : 8 * c.quad_order);
  const ScalarField rho(Domain::whole(dim), [density](const Point&) { return density; });
  const RadialGrid grid = RadialGrid::uniform(0.25, 0.75, 10, 4);
  for (double h : {0.3, 1.0}) {
    const CapMaximalProfile t = cap_maximal_profile(rho, h, Point::Zero(dim), grid, coarse, NormKind::Lq);
    double err = 0.0;
    for (double v : t.values) err = std::max(err, std::abs(v - density * cap_area(h, dim)));
    r.checks.push_back(upper_check("constant density: |T - density cap_area| at h = " + json(h).dump(), err,
                                   2.0 * density * coarse.equator_spacing()));
  }

  // Exceptional sets from the equi-integrability modulus of a laminate density.
  {
    const double r0 = 0.25, r1 = 0.75, eps = 1.0;
    std::vector<WeightedSamples> fam;
    std::vector<ScalarField> dens;
    const RadialGrid fine = RadialGrid::uniform(r0, r1, 64, 4);
    for (int n : {4, 8, 16}) {
      const LaminateCoefficient a = LaminateCoefficient::two_phase(n, 1.0, 4.0);
      const ScalarField d(Domain::whole(dim), [a, r0, r1](const Point& x) {
        const double t = (x.norm() - r0) / (r1 - r0);
        return a(std::clamp(t, 0.0, 1.0 - 1e-15));
      });
      dens.push_back(d);
      const Cubature cub = annulus_cubature(Point::Zero(dim), fine, coarse);
      WeightedSamples s;
      for (Eigen::Index j = 0; j < cub.size(); ++j) s.add(d(cub.point(j)), cub.weights[j]);
      fam.push_back(std::move(s));
    }
    bool ok = true;
    double worst_ratio = 0.0;
    for (int k = 1; k <= 3; ++k) {
      const double delta = equiintegrability_delta(fam, eps, k, ModulusMode::l1());
      const double h = cap_radius_for_delta(delta, dim, r0, r1);
      for (const auto& d : dens) {
        const CapMaximalProfile t = cap_maximal_profile(d, h, Point::Zero(dim), fine, coarse, NormKind::Lq);
        const ExceptionalSet e = exceptional_set(t, eps, k, r0, r1);
        ok = ok && e.measure <= e.bound;
        worst_ratio = std::max(worst_ratio, e.measure / e.bound);
      }
    }
    r.checks.push_back({"exceptional set |E_{n,k}| / bound, max over n, k", worst_ratio, 1.0, 0.0, ok, true});
  }
  r.reference = 0.0;
  r.provenance = "DERIVED";
  (void)worst;
}

using Runner = void (*)(const ExperimentConfig&, Report&);

const std::map<std::string, Runner>& runners() {
  static const std::map<std::string, Runner> table = {
      {"beta-asymptotic", exp_beta},
      {"divcurl-concentration", exp_divcurl_concentration},
      {"divcurl-weak-null", exp_divcurl_weak_null},
      {"structure-residuals", exp_structure_residuals},
      {"equi-integrability", exp_equi_integrability},
      {"selection-bound", exp_selection},
      {"radial-flux", exp_radial_flux},
      {"lorentz-norms", exp_lorentz},
      {"jacobian-consistency", exp_jacobian_consistency},
      {"jacobian-concentration", exp_jacobian_concentration},
      {"homog-flux", exp_homog},
      {"cap-machinery", exp_cap},
  };
  return table;
}

std::string fmt(double v) { return json(v).dump(); }

}  // namespace

std::vector<int> doubling_ladder(int first, int n_max) {
  std::vector<int> out;
  for (int n = first; n <= n_max; n *= 2) out.push_back(n);
  return out;
}

void ExperimentConfig::validate() const {
  if (!runners().count(experiment)) {
    throw Error(ErrorCode::UnknownExperiment, "no experiment named '" + experiment + "'");
  }
  if (dim != 2 && dim != 3) throw Error(ErrorCode::InvalidConfig, "dim: must be 2 or 3");
  if (p && !(*p >= 1.0)) throw Error(ErrorCode::InvalidConfig, "p: must be >= 1");
  if (q && !(*q >= 1.0)) throw Error(ErrorCode::InvalidConfig, "q: must be >= 1");
  if (!(rho >= 1.0)) throw Error(ErrorCode::InvalidConfig, "rho: must be >= 1");
  if (n_max < 64) throw Error(ErrorCode::InvalidConfig, "n-max: ladder 8..n_max needs n_max >= 64");
  if (quad_order < 2 || quad_order > 256) throw Error(ErrorCode::InvalidConfig, "quad-order: must lie in [2, 256]");
  if (lambda && !(*lambda > 0.0)) throw Error(ErrorCode::InvalidConfig, "lambda: must be positive");
  if (k && *k < 0) throw Error(ErrorCode::InvalidConfig, "k: must be >= 0");
  if (alpha && !(*alpha > 0.0)) throw Error(ErrorCode::InvalidConfig, "alpha: must be positive");
  if (format != "json" && format != "csv") throw Error(ErrorCode::InvalidConfig, "format: must be json or csv");
  if (threads < 1) throw Error(ErrorCode::InvalidConfig, "threads: must be >= 1");
}

const Check* Report::find(const std::string& name) const {
  for (const auto& c : checks) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

std::vector<CatalogEntry> list_experiments() {
  return {
      {"beta-asymptotic", "Eq. (paliej), proof of Prop. 2.10",
       "exact n^{k+1} int r^k (1-r)^{n alpha} dr against k!/alpha^{k+1}", {1}},
      {"divcurl-concentration", "Prop. 2.10, Eq. (cocont3)",
       "concentration coefficient of sigma_n . eta_n on the axis", {2}},
      {"divcurl-weak-null", "Prop. 2.10, Eqs. (cocont)/(cocont2)",
       "weak limits of sigma_n, eta_n and sigma_n . eta_n for p > 1", {3}},
      {"structure-residuals", "Prop. 2.10, Eq. (dicur)", "finite-difference div sigma_n and curl eta_n", {4}},
      {"equi-integrability", "Theorems 2.5/2.7, Eq. (equico)",
       "equi-integrability modulus of |eta_n|^p near the axis", {5}},
      {"selection-bound", "Lemma 2.2", "good-radii selection bound and trace convergence", {6}},
      {"radial-flux", "Lemma 2.4, Eq. (hn)", "flux of solenoidal and radial fields through spheres", {7}},
      {"lorentz-norms", "Eq. (nolor), Definition of L^{p,1}",
       "Lorentz norm formulas, indicator norms, equimeasurability", {8}},
      {"jacobian-consistency", "Theorem 3.8, Eq. (Mdet)",
       "divergence-form vs pointwise determinant, cofactor and Piola identities", {9}},
      {"jacobian-concentration", "Example 3.9", "concentration of det(Du_n) on the axis and sup-norm limit", {10}},
      {"homog-flux", "Section 3.1, Theorem 3.6", "1-D laminate and stiff-inclusion flux convergence", {11}},
      {"cap-machinery", "Lemmas 2.8-2.9", "cap areas, cap-maximal profiles and exceptional sets", {12}},
  };
}

Report run(const ExperimentConfig& config) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  Report r;
  r.experiment = config.experiment;
  r.seed = config.seed;
  runners().at(config.experiment)(config, r);
  r.pass = true;
  for (const auto& c : r.checks) {
    if (c.required && !c.pass) r.pass = false;
  }
  r.runtime_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return r;
}

nlohmann::ordered_json to_json(const Report& report, bool include_runtime) {
  json j;
  j["experiment"] = report.experiment;
  j["params"] = report.params;
  j["table"] = json::array();
  for (const auto& [n, v] : report.table) j["table"].push_back({{"n", n}, {"value", v}});
  if (report.extrapolated) {
    j["extrapolated"] = {{"value", report.extrapolated->value},
                         {"rate", report.extrapolated->rate},
                         {"residual", report.extrapolated->residual}};
  } else {
    j["extrapolated"] = nullptr;
  }
  if (report.reference) {
    j["reference"] = {{"value", *report.reference}, {"provenance", report.provenance}};
  } else {
    j["reference"] = nullptr;
  }
  j["checks"] = json::array();
  for (const auto& c : report.checks) {
    j["checks"].push_back({{"name", c.name},
                           {"value", c.value},
                           {"reference", c.reference},
                           {"tolerance", c.tolerance},
                           {"pass", c.pass},
                           {"required", c.required}});
  }
  j["notes"] = report.notes;
  j["pass"] = report.pass;
  j["seed"] = report.seed;
  if (include_runtime) j["runtime_ms"] = report.runtime_ms;
  return j;
}

std::string to_csv(const Report& report) {
  std::ostringstream os;
  os << "n,value\n";
  for (const auto& [n, v] : report.table) os << n << ',' << fmt(v) << '\n';
  os << "# experiment: " << report.experiment << '\n';
  if (report.extrapolated) {
    os << "# extrapolated: value=" << fmt(report.extrapolated->value)
       << " rate=" << fmt(report.extrapolated->rate)
       << " residual=" << fmt(report.extrapolated->residual) << '\n';
  }
  if (report.reference) {
    os << "# reference: " << fmt(*report.reference) << " (" << report.provenance << ")\n";
  }
  for (const auto& c : report.checks) {
    os << "# check: " << c.name << " value=" << fmt(c.value) << " reference=" << fmt(c.reference)
       << " tolerance=" << fmt(c.tolerance) << ' ' << (c.pass ? "PASS" : "FAIL")
       << (c.required ? "" : " (info)") << '\n';
  }
  for (const auto& n : report.notes) os << "# note: " << n << '\n';
  os << "# pass: " << (report.pass ? "true" : "false") << '\n';
  os << "# seed: " << report.seed << '\n';
  os << "# runtime_ms: " << fmt(report.runtime_ms) << '\n';
  return os.str();
}

}  // namespace divcurl
