#include <cstdlib>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "divcurl/experiments.hpp"

namespace {

int env_threads() {
  const char* v = std::getenv("DIVCURL_THREADS");
  if (v == nullptr) return 1;
  const int t = std::atoi(v);
  return t > 0 ? t : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Experiment runner for the div-curl numerical laboratory"};
  divcurl::ExperimentConfig cfg;
  bool list = false;
  double p = 0, q = 0, lambda = 0, alpha = 0;
  int k = 0;

  app.add_flag("--list", list, "Print the experiment catalog and exit");
  app.add_option("--experiment", cfg.experiment, "Experiment name");
  app.add_option("--dim", cfg.dim, "Ambient dimension N (2 or 3)");
  auto* p_opt = app.add_option("--p", p, "Exponent p");
  auto* q_opt = app.add_option("--q", q, "Exponent q");
  app.add_option("--rho", cfg.rho, "Coefficient integrability exponent");
  app.add_option("--n-max", cfg.n_max, "Largest ladder index");
  app.add_option("--quad-order", cfg.quad_order, "Quadrature order");
  auto* l_opt = app.add_option("--lambda", lambda, "Selection threshold");
  auto* k_opt = app.add_option("--k", k, "Power k (beta-asymptotic)");
  auto* a_opt = app.add_option("--alpha", alpha, "Exponent alpha (beta-asymptotic)");
  app.add_option("--seed", cfg.seed, "Seed of the sample clouds");
  app.add_option("--out", cfg.out, "Output file (stdout when empty)");
  app.add_option("--format", cfg.format, "json or csv");
  CLI11_PARSE(app, argc, argv);

  if (list) {
    nlohmann::ordered_json cat = nlohmann::ordered_json::array();
    for (const auto& e : divcurl::list_experiments()) {
      cat.push_back({{"name", e.name}, {"citation", e.citation}, {"summary", e.summary}, {"criteria", e.criteria}});
    }
    std::cout << cat.dump(2) << '\n';
    return 0;
  }
  if (*p_opt) cfg.p = p;
  if (*q_opt) cfg.q = q;
  if (*l_opt) cfg.lambda = lambda;
  if (*k_opt) cfg.k = k;
  if (*a_opt) cfg.alpha = alpha;
  cfg.threads = env_threads();

  divcurl::Report report;
  try {
    std::cerr << "running " << cfg.experiment << " (threads = " << cfg.threads << ")\n";
    report = divcurl::run(cfg);
  } catch (const divcurl::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  const std::string text = cfg.format == "csv" ? divcurl::to_csv(report) : divcurl::to_json(report).dump(2) + "\n";
  if (cfg.out.empty()) {
    std::cout << text;
  } else {
    std::ofstream os(cfg.out);
    if (!os) {
      std::cerr << "error: cannot write " << cfg.out << '\n';
      return 2;
    }
    os << text;
  }
  std::cerr << cfg.experiment << ": " << (report.pass ? "pass" : "FAIL") << " in " << report.runtime_ms << " ms\n";
  return report.pass ? 0 : 1;
}
