#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "mgale/experiment.hpp"

namespace {

using json = nlohmann::json;

int run(const std::string& path, const std::optional<std::uint64_t>& seed, const std::string& out,
        const std::optional<int>& resolution) {
  json cfg;
  try {
    std::ifstream in(path);
    if (!in) throw mgale::ConfigError("cannot read " + path);
    cfg = json::parse(in);
    // overrides go into the document so the config hash reflects them
    if (seed) cfg["seed"] = *seed;
    if (!out.empty()) cfg["output"]["path"] = out;
    if (resolution) cfg["parameters"]["J"] = *resolution;
  } catch (const json::exception& e) {
    std::cerr << "mgale: malformed configuration: " << e.what() << '\n';
    return 2;
  } catch (const mgale::ConfigError& e) {
    std::cerr << "mgale: " << e.what() << '\n';
    return 2;
  }

  mgale::ExperimentConfig config;
  try {
    config = mgale::ExperimentConfig::parse(cfg);
  } catch (const mgale::ConfigError& e) {
    std::cerr << "mgale: " << e.what() << '\n';
    return 2;
  }

  const auto result = mgale::run_experiment(config);
  if (config.output_path.empty()) {
    std::cout << result.report;
  } else {
    std::ofstream f(config.output_path, std::ios::binary);
    if (!f) {
      std::cerr << "mgale: cannot write " << config.output_path << '\n';
      return 1;
    }
    f << result.report;
  }
  if (!result.error.empty()) std::cerr << "mgale: " << result.error << '\n';
  if (result.failures > 0) std::cerr << "mgale: " << result.failures << " failed audit(s)\n";
  return result.exit_code;
}

void print_suites() {
  for (const auto& s : mgale::list_suites()) {
    std::cout << s.name << '\t' << s.kind << '\t' << s.anchor << "\n    output: " << s.output << "\n    parameters:";
    for (const auto& p : s.parameters) std::cout << ' ' << p;
    std::cout << '\n';
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dyadic martingale audits and dilated series diagnostics"};
  app.set_version_flag("--version", std::string(mgale::kVersion));
  app.require_subcommand(1);

  auto* run_cmd = app.add_subcommand("run", "run an experiment configuration");
  std::string config_path, out;
  std::optional<std::uint64_t> seed;
  std::optional<int> resolution;
  run_cmd->add_option("config", config_path, "configuration JSON")->required();
  run_cmd->add_option("--seed", seed, "override the configured seed");
  run_cmd->add_option("--out", out, "write the report here instead of standard output");
  run_cmd->add_option("--resolution", resolution, "override the grid resolution J");

  auto* suites_cmd = app.add_subcommand("suites", "list the available suites");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (*suites_cmd) {
    print_suites();
    return 0;
  }
  return run(config_path, seed, out, resolution);
}
