#pragma once

// Named experiments with machine-readable reports. Each experiment is a pure
// function of its configuration; sample clouds use the recorded seed.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "divcurl/pairing.hpp"

namespace divcurl {

struct ExperimentConfig {
  std::string experiment;
  int dim = 3;
  std::optional<double> p;
  std::optional<double> q;
  double rho = 1.0;
  int n_max = 512;
  int quad_order = 16;
  std::optional<double> lambda;
  std::optional<int> k;          ///< beta-asymptotic only
  std::optional<double> alpha;   ///< beta-asymptotic only
  std::string out;
  std::string format = "json";
  std::uint64_t seed = 20240611;
  int threads = 1;

  /// Throws InvalidConfig naming the offending field.
  void validate() const;
};

struct Check {
  std::string name;
  double value = 0;
  double reference = 0;
  double tolerance = 0;
  bool pass = false;
  bool required = true;  ///< informational checks do not affect the verdict
};

struct Report {
  std::string experiment;
  nlohmann::ordered_json params;
  std::vector<std::pair<int, double>> table;
  std::optional<LimitEstimate> extrapolated;
  std::optional<double> reference;
  std::string provenance;
  std::vector<Check> checks;
  std::vector<std::string> notes;
  bool pass = false;
  std::uint64_t seed = 0;
  double runtime_ms = 0;

  const Check* find(const std::string& name) const;
};

struct CatalogEntry {
  std::string name;
  std::string citation;
  std::string summary;
  std::vector<int> criteria;  ///< acceptance rows reproduced by the experiment
};

std::vector<CatalogEntry> list_experiments();

Report run(const ExperimentConfig& config);

nlohmann::ordered_json to_json(const Report& report, bool include_runtime = true);
std::string to_csv(const Report& report);

/// Doubling ladder 8, 16, ... up to n_max.
std::vector<int> doubling_ladder(int first, int n_max);

}  // namespace divcurl
