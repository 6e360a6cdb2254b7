#include "landscape_lab/experiments.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace ex = landscape_lab::experiments;

int main(int argc, char** argv) {
  CLI::App app{"Landscape experiments for matrix sensing and phase retrieval"};
  app.set_version_flag("--version", std::string(landscape_lab::kVersion));

  std::optional<std::string> experiment;
  std::optional<std::string> config_path;
  std::vector<std::pair<std::string, std::optional<std::string>>> flags = {
      {"n", {}},    {"k", {}},      {"r", {}},       {"m", {}},      {"trials", {}},
      {"seed", {}}, {"grid", {}},   {"out", {}},     {"format", {}}, {"samples", {}},
      {"family", {}}, {"eigvals", {}}, {"xstar", {}},
  };

  app.add_option("experiment", experiment,
                 "pr1d | pr2d | ms2d_rank1 | ms_rank2_dist | assumptions | regions_ms | regions_pr | rip");
  app.add_option("--config", config_path, "key=value config file; flags override it");
  app.add_option("--n", flags[0].second, "ambient dimension N");
  app.add_option("--k", flags[1].second, "factor rank k");
  app.add_option("--r", flags[2].second, "target rank r");
  app.add_option("--m", flags[3].second, "sample count(s), comma separated");
  app.add_option("--trials", flags[4].second, "trials per M");
  app.add_option("--seed", flags[5].second, "master seed (fallback: LANDSCAPE_LAB_SEED)");
  app.add_option("--grid", flags[6].second, "min:max:points");
  app.add_option("--out", flags[7].second, "output path prefix (default: stdout)");
  app.add_option("--format", flags[8].second, "csv | json");
  app.add_option("--samples", flags[9].second, "samples per region / assumption check / RIP probes");
  app.add_option("--family", flags[10].second, "pr | ms");
  app.add_option("--eigvals", flags[11].second, "target eigenvalues, comma separated");
  app.add_option("--xstar", flags[12].second, "phase-retrieval signal, comma separated");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : ex::kExitInvalidConfig;
  }

  try {
    ex::ExperimentConfig config;
    if (config_path) ex::load_config_file(config, *config_path);
    if (experiment) ex::apply_setting(config, "experiment", *experiment);
    if (!experiment && !config_path) {
      std::cerr << "error: no experiment given\n" << app.help();
      return ex::kExitInvalidConfig;
    }
    for (const auto& [key, value] : flags) {
      if (value) ex::apply_setting(config, key, *value);
    }
    config = ex::resolve_config(config);
    const ex::RunOutput output = ex::run(config);
    ex::write_output(output, config);
    if (output.exit_code == ex::kExitVerificationFailed) std::cerr << "verification FAILED\n";
    return output.exit_code;
  } catch (const landscape_lab::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    switch (e.code()) {
      case landscape_lab::ErrorCode::InvalidConfig:
      case landscape_lab::ErrorCode::InvalidTruth:
      case landscape_lab::ErrorCode::InvalidRank:
      case landscape_lab::ErrorCode::InvalidSampleCount:
      case landscape_lab::ErrorCode::ZeroTruthSignal:
      case landscape_lab::ErrorCode::DimensionMismatch:
        return ex::kExitInvalidConfig;
      case landscape_lab::ErrorCode::SamplerStarved:
        return ex::kExitVerificationFailed;
      default:
        return ex::kExitNumerical;
    }
  }
}
