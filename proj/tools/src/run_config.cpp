#include "thermalscatter_cli/run_config.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>

#include "thermalscatter/error.hpp"

namespace ts::cli {

RunConfig::RunConfig()
    : tolerances{
          {"cauchy", 1e-3},           // wave-operator increment stopping rule
          {"slack", 1e-6},            // absolute slack on inequality margins
          {"golden", 1e-12},          // special-function anchor values
          {"log_anchor", 1e-5},       // N0(s) + ln s near 0
          {"closed_form", 1e-6},      // criterion integral vs quadrature
          {"identity", 1e-8},         // inner-integral identity and Z1 factorization
          {"involution", 1e-3},       // B involution and unitarity defect
          {"resolvent_routes", 1e-3}, // kernel vs conjugation route
          {"resolvent_residual", 1e-2},
          {"resolvent_norm", 1e-3},   // ||R_i f|| <= (1 + tol) ||f||
          {"hs_agreement", 1e-2},     // two HS routes and refinement stability
          {"hs_symmetry", 1e-10},     // z = i vs z = -i
          {"constants", 1e-10},       // G_0 and K_hat against their oracles
          {"isometry", 1e-2},
          {"unitarity", 1e-2},
          {"trace_stability", 1e-2},  // Z1, Z2 partial sums across the top two grids
      } {}

double RunConfig::tol(const std::string& name) const {
  const auto it = tolerances.find(name);
  if (it == tolerances.end()) throw ContractError("unknown tolerance 'tol." + name + "'");
  return it->second;
}

GridPtr RunConfig::build() const { return build_grid(grid.cutoff, grid.n_per_side, grid.grading_exponent); }

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc{} || res.ptr != v.data() + v.size())
    throw ContractError("config: " + key + " expects a number, got '" + v + "'");
  return out;
}

long long to_integer(const std::string& key, const std::string& v) {
  long long out = 0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc{} || res.ptr != v.data() + v.size())
    throw ContractError("config: " + key + " expects an integer, got '" + v + "'");
  return out;
}

}  // namespace

void apply_setting(RunConfig& config, const std::string& raw_key, const std::string& raw_value) {
  const std::string key = trim(raw_key);
  const std::string value = trim(raw_value);
  if (key == "grid.cutoff") {
    config.grid.cutoff = to_double(key, value);
  } else if (key == "grid.n_per_side") {
    config.grid.n_per_side = static_cast<int>(to_integer(key, value));
  } else if (key == "grid.grading_exponent") {
    config.grid.grading_exponent = to_double(key, value);
  } else if (key == "output_dir") {
    config.output_dir = value;
  } else if (key == "seed") {
    const long long s = to_integer(key, value);
    if (s < 0) throw ContractError("config: seed must be non-negative");
    config.seed = static_cast<std::uint64_t>(s);
  } else if (key == "threads") {
    config.threads = static_cast<int>(to_integer(key, value));
  } else if (key.rfind("tol.", 0) == 0) {
    const std::string name = key.substr(4);
    if (!config.tolerances.count(name)) throw ContractError("config: unknown tolerance '" + key + "'");
    config.tolerances[name] = to_double(key, value);
  } else {
    throw ContractError("config: unknown key '" + key + "'");
  }
}

void apply_config_file(RunConfig& config, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ContractError("config: cannot open '" + path + "'");
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ContractError("config: " + path + ":" + std::to_string(lineno) + ": expected key = value");
    apply_setting(config, line.substr(0, eq), line.substr(eq + 1));
  }
}

void validate(const RunConfig& config) {
  if (!(config.grid.cutoff > 0.0)) throw ContractError("config: grid.cutoff must be positive");
  if (config.grid.n_per_side < 8) throw ContractError("config: grid.n_per_side must be >= 8");
  if (!(config.grid.grading_exponent >= 1.0)) throw ContractError("config: grid.grading_exponent must be >= 1");
  if (config.threads < 1) throw ContractError("config: threads must be >= 1");
  for (const auto& [name, v] : config.tolerances)
    if (!(v > 0.0)) throw ContractError("config: tol." + name + " must be positive");
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(config.output_dir, ec);
  if (ec || !fs::is_directory(config.output_dir))
    throw ContractError("config: output_dir '" + config.output_dir + "' is not a writable directory");
  const fs::path probe = fs::path(config.output_dir) / ".thermalscatter_write_probe";
  {
    std::ofstream out(probe);
    if (!out) throw ContractError("config: output_dir '" + config.output_dir + "' is not writable");
  }
  fs::remove(probe, ec);
}

nlohmann::ordered_json to_json(const RunConfig& config) {
  nlohmann::ordered_json j;
  j["grid"] = {{"cutoff", config.grid.cutoff},
               {"n_per_side", config.grid.n_per_side},
               {"grading_exponent", config.grid.grading_exponent}};
  nlohmann::ordered_json tol = nlohmann::ordered_json::object();
  for (const auto& [name, v] : config.tolerances) tol[name] = v;
  j["tolerances"] = tol;
  j["output_dir"] = config.output_dir;
  j["seed"] = config.seed;
  j["threads"] = config.threads;
  return j;
}

}  // namespace ts::cli
