#pragma once

// Analytic critical points of the population risks, a Levenberg-damped Newton
// search for critical points of any risk, local minimization, and the
// correspondence between empirical and population minima.

#include "landscape_lab/common.hpp"
#include "landscape_lab/manifold.hpp"
#include "landscape_lab/risk_models.hpp"

#include <json.hpp>

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace landscape_lab::critical {

enum class Kind { LocalMin, StrictSaddle, Degenerate };

std::string_view to_string(Kind kind);

struct Tolerances {
  double crit;    // gradient norm accepted as critical
  double eig;     // |lambda_min| below this is Degenerate
  double dedupe;  // records closer than this are merged
};

/// tau_crit = 1e-8 (1 + gradient scale), tau_eig = 1e-6 Hessian scale,
/// tau_dedupe = 1e-4 domain scale.
Tolerances default_tolerances(const risk::RiskModel& model);

Kind classify(double lambda_min, double tau_eig);

struct AnalyticPoint {
  Matrix location;
  Kind kind;
  std::string label;
};

/// W_u Lambda_u^{1/2} for every k-subset u of the r eigenpairs; the top-k
/// selection is the global minimum, all others strict saddles.
std::vector<AnalyticPoint> analytic_critical_points_ms(const risk::SensingGroundTruth& truth);

/// 0, +-x*, and +-|x*|/sqrt(3) w_i for an orthonormal basis w_i of the
/// orthogonal complement of x*. Throws ZeroTruthSignal.
std::vector<AnalyticPoint> analytic_critical_points_pr(const Vector& xstar);

/// Rank-one sensing on R^N: 0 (Hessian -x* x*^T) and +-x*.
std::vector<AnalyticPoint> analytic_critical_points_rank1_sensing(const Vector& xstar);

struct CriticalPointRecord {
  Matrix location;
  double grad_norm = 0.0;
  double lambda_min = 0.0;
  Kind kind = Kind::Degenerate;
  Matrix basin_seed;
  std::size_t seed_index = 0;
  std::size_t iterations = 0;
};

struct SearchConfig {
  std::vector<Matrix> seeds;
  std::size_t max_iter = 200;
  /// Extra Newton steps after reaching tau_crit, kept while they reduce |grad|.
  std::size_t polish_steps = 60;
  /// Step cap in units of the domain scale.
  double trust_radius = 0.5;
  std::optional<Tolerances> tolerances;
};

struct SeedFailure {
  std::size_t seed_index;
  std::string reason;
};

struct SearchResult {
  std::vector<CriticalPointRecord> records;
  std::vector<SeedFailure> failures;
  std::size_t converged_before_dedupe = 0;
};

/// Seeds on a points x points x ... grid over [lo, hi]^dim.
std::vector<Matrix> grid_seeds(Eigen::Index dim, double lo, double hi, std::size_t points);

/// Euclidean distance for vector domains and rank-one factors, Procrustes
/// distance for factors with k > 1.
double domain_distance(const risk::RiskModel& model, const Matrix& a, const Matrix& b);

/// Levenberg-Marquardt on the gradient map from each seed, deduplication and
/// spectral classification. Deterministic given the seeds.
SearchResult find_critical_points(const risk::RiskModel& model, const SearchConfig& config);

struct MinimizeConfig {
  std::size_t max_iter = 100;
  std::optional<Tolerances> tolerances;
  double trust_radius = 0.5;
};

struct MinimizeResult {
  Matrix point;
  bool converged = false;
  std::size_t iterations = 0;
  double grad_norm = 0.0;
  double lambda_min = 0.0;
  double value = 0.0;
};

/// Damped Newton descent restricted to horizontal directions (shift
/// max(0, delta - lambda_min) keeps the model convex) with Armijo backtracking.
/// Converges when |grad| <= tau_crit at a point with lambda_min >= tau_eig.
MinimizeResult local_minimize(const risk::RiskModel& model, const Matrix& start, const MinimizeConfig& config = {});

/// Distance from u to the set of population global minimizers. Procrustes
/// distance to the canonical minimizer when lambda_k > lambda_{k+1}. When all
/// of lambda_1..lambda_k equal lambda_{k+1} = lambda (the minimizers are then
/// every sqrt(lambda) V with V orthonormal in the tied eigenspace W_t), the
/// closed form |U|^2 + k lambda - 2 sqrt(lambda) |W_t^T U|_* is used. Other
/// ties crossing k fall back to the canonical minimizer.
double distance_to_minimizer_set(const risk::SensingGroundTruth& truth, const Matrix& u);

struct MatchedPair {
  std::size_t population;
  std::size_t empirical;
  double distance;
  bool within_bound;
};

struct CorrespondenceReport {
  std::vector<Matrix> population_minima;
  std::vector<Matrix> empirical_minima;
  std::vector<MatchedPair> pairs;
  std::vector<std::size_t> unmatched_population;
  /// Empirical minima without a population partner ("spurious").
  std::vector<std::size_t> unmatched_empirical;
  double epsilon = 0.0;
  double eta = 0.0;
  /// 2 epsilon / eta with sigma = 1.
  double heuristic_bound = 0.0;
};

/// Greedy mutual-nearest matching: repeatedly pairs the closest unmatched
/// (population, empirical) couple. Uses plain Euclidean distance for vector
/// domains (so +x* and -x* are distinct partners) and Procrustes distance
/// when quotient is true.
CorrespondenceReport match_correspondence(const std::vector<Matrix>& pop_minima,
                                          const std::vector<Matrix>& emp_minima, double epsilon, double eta,
                                          bool quotient = false);

nlohmann::json to_json(const CriticalPointRecord& record);
nlohmann::json to_json(const SearchResult& result);
nlohmann::json to_json(const CorrespondenceReport& report);

}  // namespace landscape_lab::critical
