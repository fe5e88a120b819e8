#pragma once

#include <map>
#include <string>

#include "nlohmann/json_fwd.hpp"
#include "thermalscatter/grid.hpp"

namespace ts::cli {

inline constexpr const char* schema_version = "thermalscatter.report/1";

struct GridConfig {
  double cutoff = 40.0;
  int n_per_side = 512;
  double grading_exponent = 2.0;
};

struct RunConfig {
  GridConfig grid;
  // Named tolerances; defaults are the acceptance thresholds.
  std::map<std::string, double> tolerances;
  std::string output_dir = ".";
  std::uint64_t seed = 0;
  int threads = 1;

  RunConfig();

  double tol(const std::string& name) const;
  GridPtr build() const;
};

// Applies one key = value assignment. Throws ContractError for unknown keys or bad values.
void apply_setting(RunConfig& config, const std::string& key, const std::string& value);

// Reads key = value lines; '#' starts a comment, blank lines are ignored.
void apply_config_file(RunConfig& config, const std::string& path);

// Checks the RunConfig invariants: positive tolerances, threads >= 1, writable output_dir.
void validate(const RunConfig& config);

nlohmann::ordered_json to_json(const RunConfig& config);

}  // namespace ts::cli
