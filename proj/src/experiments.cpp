#include "landscape_lab/experiments.hpp"

#include "landscape_lab/critical_points.hpp"
#include "landscape_lab/landscape.hpp"
#include "landscape_lab/risk_models.hpp"
#include "landscape_lab/rng.hpp"
#include "landscape_lab/spectral.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

namespace landscape_lab::experiments {

namespace {

[[noreturn]] void invalid(const std::string& what) { throw Error(ErrorCode::InvalidConfig, what); }

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

template <typename T>
T parse_number(std::string_view text, std::string_view key) {
  text = trim(text);
  T value{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    invalid("cannot parse " + std::string(key) + "='" + std::string(text) + "'");
  }
  return value;
}

template <typename T>
std::vector<T> parse_list(std::string_view text, std::string_view key) {
  std::vector<T> out;
  while (true) {
    const auto comma = text.find(',');
    out.push_back(parse_number<T>(text.substr(0, comma), key));
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  return out;
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

template <typename T>
std::string join(const std::vector<T>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ",";
    if constexpr (std::is_floating_point_v<T>) {
      out += format_double(values[i]);
    } else {
      out += std::to_string(values[i]);
    }
  }
  return out;
}

Vector to_vector(const std::vector<double>& values) {
  return Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
}

std::vector<double> alternating(Eigen::Index n) {
  std::vector<double> out(static_cast<std::size_t>(n));
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = i % 2 == 0 ? 1.0 : -1.0;
  return out;
}

bool uses_xstar(Experiment e, const std::string& family) {
  return e == Experiment::pr1d || e == Experiment::pr2d || e == Experiment::ms2d_rank1 ||
         e == Experiment::regions_pr || (e == Experiment::assumptions && family == "pr");
}

std::uint64_t seed_of(const ExperimentConfig& config) { return config.master_seed.value_or(0); }

risk::SensingGroundTruth sensing_truth(const ExperimentConfig& config) {
  return risk::SensingGroundTruth::axis_aligned(config.n, to_vector(config.eigvals), config.k);
}

std::string m_label(Eigen::Index m) { return "M" + std::to_string(m); }

std::string seed_string(std::uint64_t seed) { return std::to_string(seed); }

void check_finite(const RunOutput& output) {
  for (const Table& t : output.tables) {
    for (const auto& row : t.rows) {
      for (const Cell& c : row) {
        if (const double* d = std::get_if<double>(&c); d && !std::isfinite(*d)) {
          throw Error(ErrorCode::NonFiniteEntry, "non-finite value in table " + t.name);
        }
      }
    }
  }
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw Error(ErrorCode::InvalidConfig, "cannot open output file " + path);
  file << text;
  if (!file) throw Error(ErrorCode::InvalidConfig, "cannot write output file " + path);
}

}  // namespace

std::string_view to_string(Experiment experiment) {
  switch (experiment) {
    case Experiment::pr1d:
      return "pr1d";
    case Experiment::pr2d:
      return "pr2d";
    case Experiment::ms2d_rank1:
      return "ms2d_rank1";
    case Experiment::ms_rank2_dist:
      return "ms_rank2_dist";
    case Experiment::assumptions:
      return "assumptions";
    case Experiment::regions_ms:
      return "regions_ms";
    case Experiment::regions_pr:
      return "regions_pr";
    case Experiment::rip:
      return "rip";
  }
  return "unknown";
}

std::string_view to_string(Format format) { return format == Format::csv ? "csv" : "json"; }

Experiment parse_experiment(std::string_view name) {
  for (Experiment e : {Experiment::pr1d, Experiment::pr2d, Experiment::ms2d_rank1, Experiment::ms_rank2_dist,
                       Experiment::assumptions, Experiment::regions_ms, Experiment::regions_pr, Experiment::rip}) {
    if (to_string(e) == name) return e;
  }
  invalid("unknown experiment '" + std::string(name) + "'");
}

Format parse_format(std::string_view name) {
  if (name == "csv") return Format::csv;
  if (name == "json") return Format::json;
  invalid("unknown format '" + std::string(name) + "'");
}

double GridSpec::at(std::size_t i) const {
  if (i + 1 == points) return max;
  return min + (max - min) * static_cast<double>(i) / static_cast<double>(points - 1);
}

GridSpec parse_grid(std::string_view text) {
  const auto a = text.find(':');
  const auto b = a == std::string_view::npos ? a : text.find(':', a + 1);
  if (b == std::string_view::npos) invalid("grid must be min:max:points, got '" + std::string(text) + "'");
  GridSpec g;
  g.min = parse_number<double>(text.substr(0, a), "grid.min");
  g.max = parse_number<double>(text.substr(a + 1, b - a - 1), "grid.max");
  g.points = parse_number<std::size_t>(text.substr(b + 1), "grid.points");
  return g;
}

void apply_setting(ExperimentConfig& config, std::string_view key, std::string_view value) {
  key = trim(key);
  value = trim(value);
  if (key == "experiment") {
    config.experiment = parse_experiment(value);
  } else if (key == "n") {
    config.n = parse_number<Eigen::Index>(value, key);
  } else if (key == "k") {
    config.k = parse_number<Eigen::Index>(value, key);
  } else if (key == "r") {
    config.r = parse_number<Eigen::Index>(value, key);
  } else if (key == "m") {
    config.m = parse_list<Eigen::Index>(value, key);
  } else if (key == "trials") {
    config.trials = parse_number<std::size_t>(value, key);
  } else if (key == "seed") {
    config.master_seed = parse_number<std::uint64_t>(value, key);
  } else if (key == "grid") {
    config.grid = parse_grid(value);
  } else if (key == "out") {
    config.out = std::string(value);
  } else if (key == "format") {
    config.format = parse_format(value);
  } else if (key == "samples") {
    config.samples = parse_number<std::size_t>(value, key);
  } else if (key == "family") {
    config.family = std::string(value);
  } else if (key == "eigvals") {
    config.eigvals = parse_list<double>(value, key);
  } else if (key == "xstar") {
    config.xstar = parse_list<double>(value, key);
  } else {
    invalid("unknown config key '" + std::string(key) + "'");
  }
}

void load_config_file(ExperimentConfig& config, const std::string& path) {
  std::ifstream file(path);
  if (!file) invalid("cannot read config file " + path);
  std::string line;
  std::size_t number = 0;
  while (std::getline(file, line)) {
    ++number;
    std::string_view view = line;
    if (const auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
    view = trim(view);
    if (view.empty()) continue;
    const auto eq = view.find('=');
    if (eq == std::string_view::npos) invalid(path + ":" + std::to_string(number) + ": expected key=value");
    apply_setting(config, view.substr(0, eq), view.substr(eq + 1));
  }
}

std::optional<std::string> process_env(const char* name) {
  const char* value = std::getenv(name);
  return value ? std::optional<std::string>(value) : std::nullopt;
}

ExperimentConfig resolve_config(ExperimentConfig c, const EnvLookup& env) {
  if (!c.master_seed) {
    if (const auto s = env ? env("LANDSCAPE_LAB_SEED") : std::nullopt; s && !trim(*s).empty()) {
      c.master_seed = parse_number<std::uint64_t>(*s, "LANDSCAPE_LAB_SEED");
    } else {
      c.master_seed = 0;
    }
  }
  const Experiment e = c.experiment;
  if (e == Experiment::assumptions && c.family.empty()) c.family = "pr";
  if (e == Experiment::assumptions && c.family != "pr" && c.family != "ms") {
    invalid("family must be pr or ms, got '" + c.family + "'");
  }
  if (e != Experiment::assumptions && !c.family.empty()) {
    const bool pr_like = e == Experiment::pr1d || e == Experiment::pr2d || e == Experiment::regions_pr;
    if (c.family != (pr_like ? "pr" : "ms")) invalid("family '" + c.family + "' does not fit this experiment");
  }
  if (e != Experiment::assumptions) {
    const bool pr_like = e == Experiment::pr1d || e == Experiment::pr2d || e == Experiment::regions_pr;
    c.family = pr_like ? "pr" : "ms";
  }

  const bool pr_domain = uses_xstar(e, c.family);
  if (pr_domain) {
    Eigen::Index forced = e == Experiment::pr1d ? 1 : (e == Experiment::pr2d || e == Experiment::ms2d_rank1) ? 2 : 0;
    if (forced != 0 && c.n != 0 && c.n != forced) invalid(std::string(to_string(e)) + " requires n=" + std::to_string(forced));
    if (c.n == 0) c.n = forced != 0 ? forced : (c.xstar.empty() ? (e == Experiment::regions_pr ? 3 : 2) : static_cast<Eigen::Index>(c.xstar.size()));
    if (c.xstar.empty()) c.xstar = alternating(c.n);
    if (static_cast<Eigen::Index>(c.xstar.size()) != c.n) invalid("xstar has " + std::to_string(c.xstar.size()) + " entries, n=" + std::to_string(c.n));
    c.k = c.r = 1;
    if (!c.eigvals.empty()) invalid("eigvals does not apply to this experiment");
  } else {
    if (!c.xstar.empty()) invalid("xstar does not apply to this experiment");
    if (c.n == 0) c.n = e == Experiment::rip ? 4 : e == Experiment::assumptions ? 6 : 8;
    if (c.k == 0) c.k = 2;
    if (c.r == 0) c.r = 3;
    if (c.k < 1 || c.r < c.k || c.r > c.n) invalid("need 1 <= k <= r <= n");
    if (c.eigvals.empty()) {
      for (Eigen::Index i = 0; i < c.r; ++i) {
        c.eigvals.push_back(e == Experiment::ms_rank2_dist || i < c.k ? 1.0 : 1.0 / 12.0);
      }
    }
    if (static_cast<Eigen::Index>(c.eigvals.size()) != c.r) invalid("eigvals must have r entries");
  }
  if (c.n < 1) invalid("n must be positive");

  if (c.m.empty()) {
    switch (e) {
      case Experiment::pr1d:
        c.m = {30};
        break;
      case Experiment::pr2d:
      case Experiment::ms2d_rank1:
        c.m = {3, 10};
        break;
      case Experiment::ms_rank2_dist:
        c.m = {50, 100, 200, 400, 800};
        break;
      case Experiment::assumptions:
        c.m = c.family == "pr" ? std::vector<Eigen::Index>{10} : std::vector<Eigen::Index>{2000};
        break;
      case Experiment::rip:
        c.m = {2000};
        break;
      case Experiment::regions_ms:
      case Experiment::regions_pr:
        break;
    }
  }
  for (Eigen::Index m : c.m) {
    if (m < 1) invalid("M must be >= 1");
  }
  if (c.trials == 0) c.trials = e == Experiment::ms_rank2_dist ? 20 : 1;
  if (c.samples == 0) c.samples = e == Experiment::assumptions ? 2000 : 500;
  if (!c.grid && (e == Experiment::pr1d || e == Experiment::pr2d || e == Experiment::ms2d_rank1)) {
    c.grid = e == Experiment::pr1d ? GridSpec{-1.5, 1.5, 301} : GridSpec{-2.0, 2.0, 41};
  }
  if (c.grid && (c.grid->points < 2 || !(c.grid->max > c.grid->min))) invalid("grid needs points >= 2 and max > min");
  return c;
}

std::string canonical_string(const ExperimentConfig& c) {
  std::string s;
  s += "experiment=" + std::string(to_string(c.experiment));
  s += ";n=" + std::to_string(c.n) + ";k=" + std::to_string(c.k) + ";r=" + std::to_string(c.r);
  s += ";m=" + join(c.m);
  s += ";trials=" + std::to_string(c.trials);
  s += ";seed=" + std::to_string(seed_of(c));
  if (c.grid) s += ";grid=" + format_double(c.grid->min) + ":" + format_double(c.grid->max) + ":" + std::to_string(c.grid->points);
  s += ";samples=" + std::to_string(c.samples);
  s += ";family=" + c.family;
  s += ";eigvals=" + join(c.eigvals);
  s += ";xstar=" + join(c.xstar);
  s += ";format=" + std::string(to_string(c.format));
  return s;
}

std::string config_hash(const ExperimentConfig& config) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(canonical_string(config))));
  return buf;
}

std::string format_cell(const Cell& cell) {
  if (const double* d = std::get_if<double>(&cell)) return format_double(*d);
  if (const std::int64_t* i = std::get_if<std::int64_t>(&cell)) return std::to_string(*i);
  return std::get<std::string>(cell);
}

std::string to_csv(const Table& table, const ExperimentConfig& config) {
  std::string out = "# landscape_lab version=" + std::string(kVersion) + " master_seed=" + std::to_string(seed_of(config)) +
                    " config_hash=" + config_hash(config) + " table=" + table.name + "\n";
  for (std::size_t i = 0; i < table.columns.size(); ++i) out += (i ? "," : "") + table.columns[i];
  out += "\n";
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + format_cell(row[i]);
    out += "\n";
  }
  return out;
}

nlohmann::json to_json(const Table& table) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : table.rows) {
    nlohmann::json r = nlohmann::json::array();
    for (const Cell& c : row) std::visit([&r](const auto& v) { r.push_back(v); }, c);
    rows.push_back(r);
  }
  return {{"name", table.name}, {"columns", table.columns}, {"rows", rows}};
}

nlohmann::json metadata(const ExperimentConfig& config) {
  return {{"artifact", "landscape_lab"},
          {"version", kVersion},
          {"master_seed", seed_of(config)},
          {"config_hash", config_hash(config)},
          {"config", canonical_string(config)},
          {"rng", kRngName}};
}

std::uint64_t problem_seed(const ExperimentConfig& config, Eigen::Index m, std::uint64_t trial) {
  return stream_seed(stream_seed(seed_of(config), to_string(config.experiment), static_cast<std::uint64_t>(m)), "trial",
                     trial);
}

RunOutput run_pr1d(const ExperimentConfig& config) {
  const Vector xstar = to_vector(config.xstar);
  const Eigen::Index m = config.m.front();
  const risk::PrPopulation pop(xstar);
  const risk::PrEmpirical emp(std::make_shared<const risk::PhaseProblem>(
      risk::generate_phase_problem(xstar, m, problem_seed(config, m))));
  const double epsilon = landscape::phase_thresholds(xstar).epsilon;

  RunOutput out;
  Table table{"pr1d", {"x", "g", "f", "dg", "df", "d2g", "d2f"}, {}};
  Table intervals{"pr1d_intervals", {"x_lo", "x_hi"}, {}};
  const GridSpec& grid = *config.grid;
  std::optional<double> open;
  double previous = grid.min;
  for (std::size_t i = 0; i < grid.points; ++i) {
    const double x = grid.at(i);
    const Matrix p = Matrix::Constant(1, 1, x);
    const double dg = pop.euclidean_grad(p)(0, 0);
    table.rows.push_back({x, pop.value(p), emp.value(p), dg, emp.euclidean_grad(p)(0, 0),
                          pop.hessian(p.col(0))(0, 0), emp.hessian(p.col(0))(0, 0)});
    const bool small = std::abs(dg) <= epsilon;
    if (small && !open) open = x;
    if (!small && open) {
      intervals.rows.push_back({*open, previous});
      open.reset();
    }
    previous = x;
  }
  if (open) intervals.rows.push_back({*open, previous});
  out.tables = {table, intervals};
  out.report = {{"meta", metadata(config)},
                {"M", m},
                {"problem_seed", problem_seed(config, m)},
                {"epsilon", epsilon},
                {"small_gradient_intervals", intervals.rows.size()}};
  return out;
}

RunOutput run_2d_landscape(const ExperimentConfig& config) {
  const Vector xstar = to_vector(config.xstar);
  const bool pr = config.experiment == Experiment::pr2d;
  const auto truth = risk::SensingGroundTruth::rank_one(xstar);
  const landscape::Thresholds th = pr ? landscape::phase_thresholds(xstar) : landscape::sensing_thresholds(truth);
  const GridSpec& grid = *config.grid;

  std::vector<std::pair<std::string, std::unique_ptr<risk::RiskModel>>> risks;
  std::vector<std::uint64_t> seeds;
  if (pr) {
    risks.emplace_back("population", std::make_unique<risk::PrPopulation>(xstar));
  } else {
    risks.emplace_back("population", std::make_unique<risk::MsPopulation>(truth));
  }
  seeds.push_back(0);
  for (Eigen::Index m : config.m) {
    const std::uint64_t s = problem_seed(config, m);
    if (pr) {
      risks.emplace_back(m_label(m), std::make_unique<risk::PrEmpirical>(std::make_shared<const risk::PhaseProblem>(
                                         risk::generate_phase_problem(xstar, m, s))));
    } else {
      risks.emplace_back(m_label(m), std::make_unique<risk::MsEmpirical>(
                                         std::make_shared<const risk::SensingEnsemble>(
                                             risk::generate_sensing_ensemble(truth, m, s)),
                                         truth));
    }
    seeds.push_back(s);
  }

  critical::SearchConfig search;
  search.seeds = critical::grid_seeds(2, grid.min, grid.max, grid.points);

  RunOutput out;
  nlohmann::json panels = nlohmann::json::array();
  std::vector<Matrix> pop_minima;
  std::size_t pop_saddles = 0;
  for (std::size_t idx = 0; idx < risks.size(); ++idx) {
    const auto& [label, model] = risks[idx];
    Table values{"grid_" + label, {"x1", "x2", "value"}, {}};
    for (std::size_t i = 0; i < grid.points; ++i) {
      for (std::size_t j = 0; j < grid.points; ++j) {
        Matrix p(2, 1);
        p << grid.at(i), grid.at(j);
        values.rows.push_back({p(0, 0), p(1, 0), model->value(p)});
      }
    }
    const critical::SearchResult found = critical::find_critical_points(*model, search);
    Table points{"points_" + label, {"x1", "x2", "grad_norm", "lambda_min", "kind"}, {}};
    std::vector<Matrix> minima;
    std::size_t saddles = 0;
    std::size_t degenerate = 0;
    for (const auto& r : found.records) {
      points.rows.push_back({r.location(0, 0), r.location(1, 0), r.grad_norm, r.lambda_min,
                             std::string(critical::to_string(r.kind))});
      if (r.kind == critical::Kind::LocalMin) minima.push_back(r.location);
      if (r.kind == critical::Kind::StrictSaddle) ++saddles;
      if (r.kind == critical::Kind::Degenerate) ++degenerate;
    }
    out.tables.push_back(std::move(values));
    out.tables.push_back(std::move(points));

    nlohmann::json panel = {{"risk", label},
                            {"minima", minima.size()},
                            {"strict_saddles", saddles},
                            {"degenerate", degenerate},
                            {"seed_failures", found.failures.size()}};
    if (idx == 0) {
      pop_minima = minima;
      pop_saddles = saddles;
    } else {
      panel["M"] = config.m[idx - 1];
      panel["problem_seed"] = seeds[idx];
      panel["extra_saddles"] = static_cast<std::int64_t>(saddles) - static_cast<std::int64_t>(pop_saddles);
      panel["correspondence"] = critical::to_json(critical::match_correspondence(pop_minima, minima, th.epsilon, th.eta));
    }
    panels.push_back(panel);
  }
  out.report = {{"meta", metadata(config)}, {"family", config.family}, {"panels", panels}};
  return out;
}

RunOutput run_ms_rank2_distance(const ExperimentConfig& config) {
  const auto truth = sensing_truth(config);
  const Matrix start = truth.global_minimizer();
  Table summary{"distance", {"M", "trials_ok", "mean_dist", "std_dist"}, {}};
  Table trials{"trials", {"M", "trial", "seed", "converged", "distance", "iterations", "grad_norm"}, {}};
  for (Eigen::Index m : config.m) {
    std::vector<double> distances;
    for (std::size_t t = 0; t < config.trials; ++t) {
      const std::uint64_t s = problem_seed(config, m, t);
      const risk::MsEmpirical model(
          std::make_shared<const risk::SensingEnsemble>(risk::generate_sensing_ensemble(truth, m, s)), truth);
      critical::MinimizeResult result;
      bool ok = false;
      try {
        result = critical::local_minimize(model, start);
        ok = result.converged;
      } catch (const Error& e) {
        if (e.code() == ErrorCode::NonFiniteEntry) throw;
        result.point = start;
      }
      const double d = critical::distance_to_minimizer_set(truth, result.point);
      if (ok) distances.push_back(d);
      trials.rows.push_back({static_cast<std::int64_t>(m), static_cast<std::int64_t>(t), seed_string(s),
                             static_cast<std::int64_t>(ok), d, static_cast<std::int64_t>(result.iterations),
                             result.grad_norm});
    }
    const double n = static_cast<double>(distances.size());
    double mean = std::nan("");
    double sd = std::nan("");
    if (!distances.empty()) {
      mean = 0.0;
      for (double d : distances) mean += d / n;
      double ss = 0.0;
      for (double d : distances) ss += (d - mean) * (d - mean);
      sd = distances.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
    }
    summary.rows.push_back({static_cast<std::int64_t>(m), static_cast<std::int64_t>(distances.size()), mean, sd});
  }
  RunOutput out;
  out.tables = {summary, trials};
  out.report = {{"meta", metadata(config)}};
  return out;
}

RunOutput run_verification(const ExperimentConfig& config) {
  RunOutput out;
  nlohmann::json results = nlohmann::json::array();
  bool pass = true;
  const std::uint64_t master = seed_of(config);

  switch (config.experiment) {
    case Experiment::regions_pr: {
      const auto report = landscape::verify_region_bounds_pr(
          to_vector(config.xstar), {config.samples, stream_seed(master, "regions_pr", 0), 1000});
      pass = report.pass();
      results.push_back(landscape::to_json(report));
      break;
    }
    case Experiment::regions_ms: {
      const auto report = landscape::verify_region_bounds_ms(
          sensing_truth(config), {config.samples, stream_seed(master, "regions_ms", 0), 1000});
      pass = report.pass();
      results.push_back(landscape::to_json(report));
      break;
    }
    case Experiment::assumptions: {
      const std::uint64_t sample_seed = stream_seed(master, "assumption_samples", 0);
      for (Eigen::Index m : config.m) {
        const std::uint64_t s = problem_seed(config, m);
        nlohmann::json entry = {{"M", m}, {"problem_seed", s}};
        if (config.family == "pr") {
          const Vector xstar = to_vector(config.xstar);
          const auto th = landscape::phase_thresholds(xstar);
          const auto problem = std::make_shared<const risk::PhaseProblem>(risk::generate_phase_problem(xstar, m, s));
          const auto report = landscape::check_assumptions(
              risk::PrPopulation(xstar), risk::PrEmpirical(problem),
              {th.epsilon, th.eta, th.ball_radius, config.samples, sample_seed});
          entry["report"] = landscape::to_json(report);
          if (!report.pass()) entry["replay"] = risk::to_json(*problem);
          pass = pass && report.pass();
        } else {
          const auto truth = sensing_truth(config);
          const auto th = landscape::sensing_thresholds(truth);
          const auto ens = std::make_shared<const risk::SensingEnsemble>(risk::generate_sensing_ensemble(truth, m, s));
          const auto report = landscape::check_assumptions(
              risk::MsPopulation(truth), risk::MsEmpirical(ens, truth),
              {th.epsilon, th.eta, th.ball_radius, config.samples, sample_seed});
          entry["report"] = landscape::to_json(report);
          if (!report.pass()) entry["replay"] = risk::to_json(*ens, truth);
          pass = pass && report.pass();
        }
        results.push_back(entry);
      }
      break;
    }
    case Experiment::rip: {
      const auto truth = sensing_truth(config);
      const auto th = landscape::sensing_thresholds(truth);
      const double threshold = landscape::rip_threshold_from_lemma(truth, th.epsilon, th.eta);
      const Eigen::Index rank_bound = std::min(config.r + config.k, config.n);
      for (Eigen::Index m : config.m) {
        const std::uint64_t s = problem_seed(config, m);
        const auto ens = risk::generate_sensing_ensemble(truth, m, s);
        auto report = landscape::estimate_rip(ens, rank_bound, config.samples, stream_seed(master, "rip_probes", 0));
        report.threshold_from_lemma = threshold;
        const bool ok = report.delta_est <= threshold;
        nlohmann::json entry = {{"M", m}, {"problem_seed", s}, {"report", landscape::to_json(report)},
                                {"verdict", ok ? "PASS" : "FAIL"}};
        if (!ok) entry["replay"] = risk::to_json(ens, truth);
        pass = pass && ok;
        results.push_back(entry);
      }
      break;
    }
    default:
      invalid(std::string(to_string(config.experiment)) + " is not a verification suite");
  }
  out.report = {{"meta", metadata(config)},
                {"suite", to_string(config.experiment)},
                {"results", results},
                {"verdict", pass ? "PASS" : "FAIL"}};
  out.exit_code = pass ? kExitOk : kExitVerificationFailed;
  return out;
}

RunOutput run(const ExperimentConfig& config) {
  RunOutput out;
  switch (config.experiment) {
    case Experiment::pr1d:
      out = run_pr1d(config);
      break;
    case Experiment::pr2d:
    case Experiment::ms2d_rank1:
      out = run_2d_landscape(config);
      break;
    case Experiment::ms_rank2_dist:
      out = run_ms_rank2_distance(config);
      break;
    default:
      out = run_verification(config);
      break;
  }
  check_finite(out);
  return out;
}

void write_output(const RunOutput& output, const ExperimentConfig& config) {
  const bool verification = output.tables.empty();
  if (verification || config.format == Format::json) {
    nlohmann::json doc = output.report;
    if (!verification) {
      doc["tables"] = nlohmann::json::array();
      for (const Table& t : output.tables) doc["tables"].push_back(to_json(t));
    }
    const std::string text = doc.dump(2) + "\n";
    if (config.out.empty()) {
      std::cout << text;
    } else {
      write_text(config.out + ".json", text);
    }
    return;
  }
  for (std::size_t i = 0; i < output.tables.size(); ++i) {
    const std::string text = to_csv(output.tables[i], config);
    if (config.out.empty()) {
      std::cout << (i ? "\n" : "") << text;
    } else {
      write_text(config.out + "_" + output.tables[i].name + ".csv", text);
    }
  }
}

}  // namespace landscape_lab::experiments
