#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace mgale {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr int kConfigSchema = 1;

// Invalid or incomplete experiment configuration (exit status 2).
struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct SuiteInfo {
  std::string name;
  std::string kind;    // audit | dilated | davenport | ergodic | riesz | symbolic
  std::string anchor;  // the statement the suite exercises
  std::string output;  // CSV columns or JSON content
  std::vector<std::string> parameters;
};

const std::vector<SuiteInfo>& list_suites();
const SuiteInfo& find_suite(const std::string& name);  // throws ConfigError

// {"schema": 1, "kind": ..., "suite": ..., "seed": 7, "parameters": {...},
//  "output": {"path": ..., "format": "csv" | "json"}}
// The suite defaults to the first one of the kind.
struct ExperimentConfig {
  int schema = kConfigSchema;
  std::string kind;
  std::string suite;
  std::uint64_t seed = 1;
  nlohmann::json parameters = nlohmann::json::object();
  std::string output_path;  // empty: standard output
  std::string format = "json";

  static ExperimentConfig parse(const nlohmann::json& j);  // schema validation only
  nlohmann::json to_json() const;
  std::uint64_t hash() const;  // FNV-1a of the canonical JSON
};

struct ExperimentResult {
  int exit_code = 0;       // 0 ok, 1 failed audit or runtime failure, 2 config error
  std::size_t failures = 0;
  std::string report;      // full document, byte-stable for a given config
  std::string error;
};

ExperimentResult run_experiment(const ExperimentConfig& config);

}  // namespace mgale
