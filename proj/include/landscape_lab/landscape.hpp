#pragma once

// Region membership and sampled verification of the population landscape
// bounds, Monte-Carlo estimators of the empirical/population proximity
// assumptions, and restricted-isometry estimation.
//
// Every supremum reported here is the maximum over a finite sample, hence a
// lower bound of the true supremum.

#include "landscape_lab/common.hpp"
#include "landscape_lab/manifold.hpp"
#include "landscape_lab/risk_models.hpp"
#include "landscape_lab/rng.hpp"

#include <json.hpp>

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace landscape_lab::landscape {

enum class Region { MS_R1, MS_R2p, MS_R2pp, MS_R3p, MS_R3pp, PR_R1, PR_R2, PR_R3, PR_R4 };

std::string_view to_string(Region region);

struct RegionLabelSet {
  std::set<Region> labels;
  /// Quantities that decided membership, plus the thresholds they were compared with.
  std::map<std::string, double> witness;
  /// Truth outside the separated regime (or with repeated eigenvalues): labels
  /// are still computed but the region properties are not guaranteed.
  bool advisory = false;

  bool contains(Region region) const { return labels.count(region) > 0; }
};

/// Sensing regions for factor u. R1 is measured against the canonical
/// minimizer W_k Lambda_k^{1/2}.
RegionLabelSet classify_region_ms(const risk::SensingGroundTruth& truth, const manifold::FactorPoint& u);

/// Phase-retrieval regions; the saddle-circle distance is evaluated in closed form.
RegionLabelSet classify_region_pr(const Vector& xstar, const Vector& x);

/// Distance from x to {+-|x*|/sqrt(3) w : w^T x* = 0, |w| = 1}.
double saddle_circle_distance(const Vector& xstar, const Vector& x);

struct SamplerConfig {
  std::size_t samples_per_region = 500;
  std::uint64_t seed = 0;
  /// Proposals allowed per requested sample before SamplerStarved (0.1% acceptance).
  std::size_t attempts_per_sample = 1000;
};

enum class Comparison { AtLeast, AtMost, Greater };

/// Result of checking one region property on sampled members.
struct RegionCheck {
  Region region = Region::MS_R1;
  /// Property in normalized units, e.g. "lambda_min / lambda_k >= 0.19".
  std::string property;
  Comparison comparison = Comparison::AtLeast;
  double bound = 0.0;
  std::size_t accepted = 0;
  std::size_t attempts = 0;
  std::size_t violations = 0;
  /// Extreme normalized statistic over the sample (min for lower bounds, max for upper).
  double worst = 0.0;
  /// Smallest signed slack; negative means a violation.
  double worst_margin = 0.0;
  Matrix worst_point;
  bool skipped = false;
  std::string note;

  bool pass() const { return skipped || violations == 0; }
};

struct BoundReport {
  std::string family;
  SamplerConfig config;
  bool advisory = false;
  std::vector<RegionCheck> checks;

  bool pass() const;
};

/// Samples every sensing region and checks its lower/upper bound. Throws
/// InvalidTruth if the truth is not well separated, SamplerStarved when a
/// proposal yields too few members.
BoundReport verify_region_bounds_ms(const risk::SensingGroundTruth& truth, const SamplerConfig& config);
BoundReport verify_region_bounds_pr(const Vector& xstar, const SamplerConfig& config);

struct AssumptionConfig {
  double epsilon = 0.0;
  double eta = 0.0;
  double ball_radius = 0.0;
  std::size_t n_samples = 2000;
  std::uint64_t seed = 0;
};

enum class Verdict { Pass, Fail };
std::string_view to_string(Verdict verdict);

inline constexpr std::string_view kLowerBoundCaveat = "Monte-Carlo lower bound of supremum";

struct AssumptionReport {
  AssumptionConfig config;
  std::size_t n_samples = 0;
  std::size_t n_in_small_gradient_set = 0;
  double sup_grad_diff_est = 0.0;
  double sup_hess_diff_est = 0.0;
  /// Sampled points with |grad g| <= epsilon but |lambda_min(hess g)| < eta.
  std::vector<Matrix> assumption1_violations;
  Verdict curvature = Verdict::Pass;
  Verdict gradient_proximity = Verdict::Pass;
  Verdict hessian_proximity = Verdict::Pass;
  std::string caveat{kLowerBoundCaveat};

  bool pass() const {
    return curvature == Verdict::Pass && gradient_proximity == Verdict::Pass && hessian_proximity == Verdict::Pass;
  }
};

/// Uniform draw from B(l): the Euclidean ball for vector domains, and
/// {U : |U U^T|_F <= l} for factor domains (Gaussian direction, radial law of
/// a uniform ball in the gauge |U U^T|_F^{1/2}).
Matrix sample_ball(const risk::RiskModel& model, double l, RngStream& rng);

/// Compares pop and emp on n_samples points of B(l). Throws InvalidConfig for
/// non-positive thresholds or radius, DimensionMismatch if the domains differ.
AssumptionReport check_assumptions(const risk::RiskModel& pop, const risk::RiskModel& emp,
                                   const AssumptionConfig& config);

/// Largest |eigenvalue| of the difference of the two (restricted) Hessians at p.
double hessian_difference_norm(const risk::RiskModel& a, const risk::RiskModel& b, const Matrix& p);

struct RipReport {
  Eigen::Index rank_bound = 0;
  std::size_t n_probes = 0;
  std::uint64_t seed = 0;
  Eigen::Index n_measurements = 0;
  double delta_est = 0.0;
  std::optional<double> threshold_from_lemma;
  std::string caveat{kLowerBoundCaveat};
};

/// |A(Z)|^2 / |Z|_F^2 - 1 in absolute value.
double rip_deviation(const risk::SensingEnsemble& ensemble, const Matrix& z);

/// Probes Z = G G^T - H H^T (unit Frobenius norm, rank <= rank_bound). Throws
/// InvalidRank unless 1 <= rank_bound <= N.
RipReport estimate_rip(const risk::SensingEnsemble& ensemble, Eigen::Index rank_bound, std::size_t n_probes,
                       std::uint64_t seed);

/// min{ eps / (2 sqrt(8/7) k^{1/4} (8/7 |U*U*^T| + |X|) |U*U*^T|^{1/2}), 1/36,
///      eta / (2 (16/7 sqrt(k) |U*U*^T| + 8/7 |U*U*^T| + |X|)) }.
double rip_threshold_from_lemma(const risk::SensingGroundTruth& truth, double epsilon, double eta);

/// Default thresholds of the two families.
struct Thresholds {
  double epsilon;
  double eta;
  double ball_radius;
};
Thresholds sensing_thresholds(const risk::SensingGroundTruth& truth);
Thresholds phase_thresholds(const Vector& xstar);

nlohmann::json to_json(const RegionLabelSet& labels);
nlohmann::json to_json(const BoundReport& report);
nlohmann::json to_json(const AssumptionReport& report);
nlohmann::json to_json(const RipReport& report);

}  // namespace landscape_lab::landscape
