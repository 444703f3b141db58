// simulate <mode> --config <file> [--set key=value ...] --out <dir> --seed <u64> --threads <n>
//
// Exit status: 0 success, 1 configuration error, 2 every grid point failed.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "medgate/sweep.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Three-spin entangling-gate simulator"};
  std::string mode;
  std::string config_path;
  std::vector<std::string> overrides;
  std::string out;
  std::uint64_t seed = 0;
  int threads = 0;

  app.add_option("mode", mode,
                 "dynamic-map | adiabatic-map | spectrum | cphase-scan | decoherence | interference");
  app.add_option("--config", config_path, "flat key = value config file");
  app.add_option("--set", overrides, "key=value override (repeatable)");
  auto* out_opt = app.add_option("--out", out, "output directory");
  auto* seed_opt = app.add_option("--seed", seed, "master RNG seed");
  auto* threads_opt = app.add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
  auto* keys_flag = app.add_flag("--list-keys", "print recognized config keys and exit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  if (*keys_flag) {
    for (const std::string& key : medgate::known_keys()) std::cout << key << '\n';
    return 0;
  }

  medgate::RunConfig config;
  try {
    if (mode.empty()) throw medgate::ConfigError("a mode argument is required");
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw medgate::ConfigError("cannot read config file " + config_path);
      std::stringstream text;
      text << in.rdbuf();
      try {
        config = medgate::parse_config(text.str());
      } catch (const medgate::ConfigError& e) {
        throw medgate::ConfigError(config_path + ": " + e.what());
      }
    }
    medgate::apply_environment(config);
    for (const std::string& item : overrides) {
      const auto eq = item.find('=');
      if (eq == std::string::npos)
        throw medgate::ConfigError("--set expects key=value, got '" + item + "'");
      medgate::apply_override(config, item.substr(0, eq), item.substr(eq + 1));
    }
    config.mode = medgate::parse_mode(mode);
    if (*out_opt) config.out = out;
    if (*seed_opt) config.seed = seed;
    if (*threads_opt) config.threads = threads;
    medgate::validate(config);
  } catch (const std::exception& e) {
    std::cerr << "simulate: config error: " << e.what() << '\n';
    return 1;
  }

  try {
    const medgate::RunSummary summary = medgate::run(config);
    for (const auto& path : summary.outputs) std::cout << path.string() << '\n';
    if (summary.points > 0 && summary.failed_points == summary.points) {
      std::cerr << "simulate: all " << summary.points << " points failed\n";
      return 2;
    }
    if (summary.failed_points > 0)
      std::cerr << "simulate: " << summary.failed_points << " of " << summary.points
                << " points failed (valid=false)\n";
  } catch (const medgate::ConfigError& e) {
    std::cerr << "simulate: config error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "simulate: numerical failure: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
