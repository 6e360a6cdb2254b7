#pragma once

// Experiment drivers behind the command-line front end: configuration,
// seeded runs and plot-ready tables.

#include "landscape_lab/common.hpp"

#include <json.hpp>

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace landscape_lab::experiments {

enum class Experiment { pr1d, pr2d, ms2d_rank1, ms_rank2_dist, assumptions, regions_ms, regions_pr, rip };
enum class Format { csv, json };

std::string_view to_string(Experiment experiment);
std::string_view to_string(Format format);
/// Throws InvalidConfig for unknown names.
Experiment parse_experiment(std::string_view name);
Format parse_format(std::string_view name);

struct GridSpec {
  double min = -2.0;
  double max = 2.0;
  std::size_t points = 41;

  /// min + (max - min) i / (points - 1), exact at both ends.
  double at(std::size_t i) const;
};

/// "min:max:points".
GridSpec parse_grid(std::string_view text);

/// Zero and empty values mean "experiment default" until resolve_config.
struct ExperimentConfig {
  Experiment experiment = Experiment::pr1d;
  Eigen::Index n = 0;
  Eigen::Index k = 0;
  Eigen::Index r = 0;
  std::vector<Eigen::Index> m;
  std::size_t trials = 0;
  std::optional<std::uint64_t> master_seed;
  std::optional<GridSpec> grid;
  /// Output path prefix; empty writes to stdout.
  std::string out;
  Format format = Format::csv;
  /// Samples per region / per assumption check / RIP probes.
  std::size_t samples = 0;
  /// "pr" or "ms" for the assumptions suite.
  std::string family;
  /// Top eigenvalues of the sensing target.
  std::vector<double> eigvals;
  std::vector<double> xstar;
};

/// Sets one key of a flat key=value config. Keys: experiment, n, k, r, m
/// (comma list), trials, seed, grid, out, format, samples, family, eigvals,
/// xstar (comma lists). Throws InvalidConfig.
void apply_setting(ExperimentConfig& config, std::string_view key, std::string_view value);

/// Reads key=value lines ('#' starts a comment) into config.
void load_config_file(ExperimentConfig& config, const std::string& path);

using EnvLookup = std::function<std::optional<std::string>(const char*)>;
/// Reads the process environment.
std::optional<std::string> process_env(const char* name);

/// Fills defaults per experiment, takes the master seed from LANDSCAPE_LAB_SEED
/// when unset, and validates (grid points >= 2, trials >= 1, M >= 1).
ExperimentConfig resolve_config(ExperimentConfig config, const EnvLookup& env = process_env);

/// Deterministic key=value rendering of a resolved config.
std::string canonical_string(const ExperimentConfig& config);
/// fnv1a64 of canonical_string, 16 hex digits.
std::string config_hash(const ExperimentConfig& config);

using Cell = std::variant<double, std::int64_t, std::string>;

struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

/// "%.17g" for doubles.
std::string format_cell(const Cell& cell);

/// First line "# landscape_lab version=... master_seed=... config_hash=...",
/// then the header row and data rows.
std::string to_csv(const Table& table, const ExperimentConfig& config);
nlohmann::json to_json(const Table& table);
nlohmann::json metadata(const ExperimentConfig& config);

inline constexpr int kExitOk = 0;
inline constexpr int kExitVerificationFailed = 2;
inline constexpr int kExitInvalidConfig = 3;
inline constexpr int kExitNumerical = 4;

struct RunOutput {
  std::vector<Table> tables;
  nlohmann::json report = nlohmann::json::object();
  int exit_code = kExitOk;
};

/// N = 1 phase retrieval: x, g, f, dg, df, d2g, d2f over the grid, plus the
/// intervals of the grid where |g'(x)| <= epsilon.
RunOutput run_pr1d(const ExperimentConfig& config);
/// Grid values and classified critical points of the population risk and of one
/// empirical realization per M (pr2d or ms2d_rank1).
RunOutput run_2d_landscape(const ExperimentConfig& config);
/// Distance between empirical and population minima of rank-2 sensing per M.
RunOutput run_ms_rank2_distance(const ExperimentConfig& config);
/// assumptions, regions_ms, regions_pr or rip; the report is the JSON output.
RunOutput run_verification(const ExperimentConfig& config);

/// Dispatches on config.experiment. The config must be resolved.
RunOutput run(const ExperimentConfig& config);

/// Writes the run as files <out>_<table>.csv or <out>.json, or to stdout when
/// out is empty. Verification reports are always JSON.
void write_output(const RunOutput& output, const ExperimentConfig& config);

/// Seed of the empirical problem for size m within an experiment.
std::uint64_t problem_seed(const ExperimentConfig& config, Eigen::Index m, std::uint64_t trial = 0);

}  // namespace landscape_lab::experiments
