#include "landscape_lab/landscape.hpp"

#include "landscape_lab/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

namespace landscape_lab::landscape {

namespace {

Matrix as_matrix(const Vector& v) { return Matrix(v); }

nlohmann::json matrix_json(const Matrix& m) {
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", risk::row_major(m)}};
}

std::string comparison_symbol(Comparison c) {
  switch (c) {
    case Comparison::AtLeast:
      return ">=";
    case Comparison::AtMost:
      return "<=";
    case Comparison::Greater:
      return ">";
  }
  return "?";
}

struct RegionSpec {
  Region region;
  std::string property;
  Comparison comparison;
  double bound;
  std::string tag;
  std::function<std::optional<Matrix>(RngStream&)> propose;
  std::function<bool(const Matrix&)> member;
  std::function<double(const Matrix&)> statistic;
};

double margin(Comparison c, double stat, double bound) {
  return c == Comparison::AtMost ? bound - stat : stat - bound;
}

bool violates(Comparison c, double stat, double bound) {
  switch (c) {
    case Comparison::AtLeast:
      return !(stat >= bound);
    case Comparison::AtMost:
      return !(stat <= bound);
    case Comparison::Greater:
      return !(stat > bound);
  }
  return true;
}

RegionCheck run_region(const RegionSpec& spec, const SamplerConfig& config) {
  RegionCheck check;
  check.region = spec.region;
  check.property = spec.property;
  check.comparison = spec.comparison;
  check.bound = spec.bound;
  check.worst = spec.comparison == Comparison::AtMost ? -std::numeric_limits<double>::infinity()
                                                      : std::numeric_limits<double>::infinity();
  check.worst_margin = std::numeric_limits<double>::infinity();

  RngStream rng(config.seed, spec.tag, 0);
  const std::size_t budget = config.samples_per_region * config.attempts_per_sample;
  while (check.accepted < config.samples_per_region && check.attempts < budget) {
    ++check.attempts;
    const std::optional<Matrix> p = spec.propose(rng);
    if (!p || !spec.member(*p)) continue;
    ++check.accepted;
    const double stat = spec.statistic(*p);
    if (!std::isfinite(stat)) throw Error(ErrorCode::NonFiniteEntry, spec.property);
    const double m = margin(spec.comparison, stat, spec.bound);
    if (violates(spec.comparison, stat, spec.bound)) ++check.violations;
    if (m < check.worst_margin) {
      check.worst_margin = m;
      check.worst = stat;
      check.worst_point = *p;
    }
  }
  if (check.accepted < config.samples_per_region) {
    throw Error(ErrorCode::SamplerStarved, std::string(to_string(spec.region)) + ": accepted " +
                                               std::to_string(check.accepted) + " of " +
                                               std::to_string(check.attempts) + " proposals");
  }
  return check;
}

RegionCheck skipped_check(Region region, std::string property, Comparison c, double bound, std::string note) {
  RegionCheck check;
  check.region = region;
  check.property = std::move(property);
  check.comparison = c;
  check.bound = bound;
  check.skipped = true;
  check.note = std::move(note);
  return check;
}

Matrix ball_matrix(RngStream& rng, Eigen::Index rows, Eigen::Index cols, double radius) {
  return rng.in_ball(rows * cols, radius).reshaped(rows, cols);
}

std::optional<manifold::FactorPoint> try_factor(const Matrix& u) {
  try {
    return manifold::FactorPoint(u);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::RankDeficient) return std::nullopt;
    throw;
  }
}

}  // namespace

std::string_view to_string(Region region) {
  switch (region) {
    case Region::MS_R1:
      return "MS_R1";
    case Region::MS_R2p:
      return "MS_R2p";
    case Region::MS_R2pp:
      return "MS_R2pp";
    case Region::MS_R3p:
      return "MS_R3p";
    case Region::MS_R3pp:
      return "MS_R3pp";
    case Region::PR_R1:
      return "PR_R1";
    case Region::PR_R2:
      return "PR_R2";
    case Region::PR_R3:
      return "PR_R3";
    case Region::PR_R4:
      return "PR_R4";
  }
  return "unknown";
}

std::string_view to_string(Verdict verdict) { return verdict == Verdict::Pass ? "PASS" : "FAIL"; }

RegionLabelSet classify_region_ms(const risk::SensingGroundTruth& truth, const manifold::FactorPoint& u) {
  if (u.n_rows() != truth.dim() || u.n_cols() != truth.target_rank()) {
    throw Error(ErrorCode::DimensionMismatch, "classify_region_ms: factor shape does not match truth");
  }
  const Matrix& p = u.entries();
  const Matrix ustar = truth.global_minimizer();
  const double lk = truth.lambda_k();

  const double sigma_k = u.sigma_min();
  const double uut = (p * p.transpose()).norm();
  const double grad = ((p * p.transpose() - truth.target()) * p).norm();
  const double dist = manifold::procrustes_distance(p, ustar);

  const double r1_radius = 0.2 / truth.kappa() * std::sqrt(lk);
  const double sigma_cap = 0.5 * std::sqrt(lk);
  const double uut_cap = 8.0 / 7.0 * (ustar * ustar.transpose()).norm();
  const double grad_cap = std::pow(lk, 1.5) / 80.0;

  RegionLabelSet out;
  out.witness = {{"sigma_k", sigma_k},       {"uut_norm", uut},           {"grad_norm", grad},
                 {"procrustes_distance", dist}, {"r1_radius", r1_radius}, {"sigma_cap", sigma_cap},
                 {"uut_cap", uut_cap},       {"grad_cap", grad_cap}};
  out.advisory = !truth.well_separated() || truth.repeated_top_eigenvalues();

  if (dist <= r1_radius) out.labels.insert(Region::MS_R1);
  if (sigma_k <= sigma_cap && uut <= uut_cap) out.labels.insert(grad <= grad_cap ? Region::MS_R2p : Region::MS_R2pp);
  if (sigma_k > sigma_cap && dist > r1_radius && uut <= uut_cap) out.labels.insert(Region::MS_R3p);
  if (uut > uut_cap) out.labels.insert(Region::MS_R3pp);
  return out;
}

double saddle_circle_distance(const Vector& xstar, const Vector& x) {
  const double n = xstar.norm();
  const Vector unit = xstar / n;
  const double along = x.dot(unit);
  const double perp = (x - along * unit).norm();
  return std::hypot(along, perp - n / std::sqrt(3.0));
}

RegionLabelSet classify_region_pr(const Vector& xstar, const Vector& x) {
  const double n = xstar.norm();
  if (!(n > 0.0)) throw Error(ErrorCode::ZeroTruthSignal, "classify_region_pr: x* = 0");
  if (x.size() != xstar.size()) throw Error(ErrorCode::DimensionMismatch, "classify_region_pr");

  const double norm = x.norm();
  const double to_min = std::min((x - xstar).norm(), (x + xstar).norm());
  const bool has_circle = xstar.size() > 1;
  const double to_saddle = has_circle ? saddle_circle_distance(xstar, x) : std::numeric_limits<double>::infinity();

  RegionLabelSet out;
  out.witness = {{"norm", norm}, {"dist_minima", to_min}, {"dist_saddle_circle", to_saddle}, {"xstar_norm", n}};
  if (norm <= 0.5 * n) out.labels.insert(Region::PR_R1);
  if (to_min <= 0.1 * n) out.labels.insert(Region::PR_R2);
  if (to_saddle <= 0.2 * n) out.labels.insert(Region::PR_R3);
  if (out.labels.empty()) out.labels.insert(Region::PR_R4);
  return out;
}

bool BoundReport::pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const RegionCheck& c) { return c.pass(); });
}

BoundReport verify_region_bounds_ms(const risk::SensingGroundTruth& truth, const SamplerConfig& config) {
  if (!truth.well_separated()) {
    throw Error(ErrorCode::InvalidTruth, "verify_region_bounds_ms requires lambda_{k+1} <= lambda_k / 12");
  }
  const auto pop = std::make_shared<risk::MsPopulation>(truth);
  const Eigen::Index n = truth.dim();
  const Eigen::Index k = truth.target_rank();
  const Eigen::Index r = truth.rank();
  const double lk = truth.lambda_k();
  const double l1 = truth.eigvals()(0);
  const double kappa = truth.kappa();
  const Matrix ustar = truth.global_minimizer();
  const double uut_cap = 8.0 / 7.0 * (ustar * ustar.transpose()).norm();
  const double grad_scale = std::pow(lk, 1.5);

  BoundReport report;
  report.family = "matrix_sensing";
  report.config = config;
  report.advisory = truth.repeated_top_eigenvalues();

  auto labelled = [&truth](Region region) {
    return [&truth, region](const Matrix& u) {
      const auto fp = try_factor(u);
      return fp && classify_region_ms(truth, *fp).contains(region);
    };
  };
  auto curvature = [pop, lk](const Matrix& u) { return spectral::min_eig_domain(*pop, u).lambda_min / lk; };
  auto grad_norm = [&truth, grad_scale](const Matrix& u) {
    return ((u * u.transpose() - truth.target()) * u).norm() / grad_scale;
  };

  // Large-gradient regions: U = F diag(s) Q^T with s_i uniform up to 1.3 sqrt(cap),
  // F alternating between a random frame and a perturbed eigenvector frame.
  auto spread = [&truth, n, k, r, uut_cap](RngStream& rng) -> std::optional<Matrix> {
    Vector s(k);
    for (Eigen::Index i = 0; i < k; ++i) s(i) = 1.3 * std::sqrt(uut_cap) * rng.uniform();
    Matrix frame = rng.stiefel(n, k);
    if (rng.uniform() < 0.5) {
      std::vector<Eigen::Index> idx(static_cast<std::size_t>(r));
      for (Eigen::Index i = 0; i < r; ++i) idx[static_cast<std::size_t>(i)] = i;
      for (Eigen::Index i = r - 1; i > 0; --i) {
        const auto j = static_cast<Eigen::Index>(rng.uniform() * static_cast<double>(i + 1));
        std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
      }
      Matrix mixed = 0.3 * frame;
      for (Eigen::Index c = 0; c < k; ++c) mixed.col(c) += truth.eigvecs().col(idx[static_cast<std::size_t>(c)]);
      Eigen::HouseholderQR<Matrix> qr(mixed);
      frame = qr.householderQ() * Matrix::Identity(n, k);
    }
    return Matrix(frame * s.asDiagonal() * rng.orthogonal(k).transpose());
  };

  const double r1_radius = 0.2 / kappa * std::sqrt(lk);
  report.checks.push_back(run_region(
      {Region::MS_R1, "lambda_min / lambda_k >= 0.19", Comparison::AtLeast, 0.19, "regions_ms/R1",
       [&](RngStream& rng) -> std::optional<Matrix> {
         return Matrix(ustar * rng.orthogonal(k) + ball_matrix(rng, n, k, r1_radius));
       },
       labelled(Region::MS_R1), curvature},
      config));

  if (r == k) {
    report.checks.push_back(skipped_check(Region::MS_R2p, "lambda_min / lambda_k <= -0.06", Comparison::AtMost,
                                          -0.06, "r = k: no analytic saddles to seed the sampler"));
  } else {
    // Centers: eigen-selections of size 0..k padded with zero columns, except the
    // top-k selection itself.
    std::vector<Matrix> centers;
    for (Eigen::Index size = 0; size <= k; ++size) {
      std::vector<bool> mask(static_cast<std::size_t>(r), false);
      std::fill(mask.begin(), mask.begin() + size, true);
      do {
        Matrix c = Matrix::Zero(n, k);
        Eigen::Index col = 0;
        bool top = size == k;
        for (Eigen::Index i = 0; i < r; ++i) {
          if (!mask[static_cast<std::size_t>(i)]) continue;
          if (i >= k) top = false;
          c.col(col++) = truth.eigvecs().col(i) * std::sqrt(truth.eigvals()(i));
        }
        if (!top) centers.push_back(c);
      } while (std::prev_permutation(mask.begin(), mask.end()));
    }
    const double radius = grad_scale / (40.0 * l1);
    report.checks.push_back(run_region(
        {Region::MS_R2p, "lambda_min / lambda_k <= -0.06", Comparison::AtMost, -0.06, "regions_ms/R2p",
         [&centers, radius, n, k](RngStream& rng) -> std::optional<Matrix> {
           const auto pick = static_cast<std::size_t>(rng.uniform() * static_cast<double>(centers.size()));
           return Matrix(centers[pick] * rng.orthogonal(k) + ball_matrix(rng, n, k, radius));
         },
         labelled(Region::MS_R2p), curvature},
        config));
  }

  report.checks.push_back(run_region({Region::MS_R2pp, "|grad g| / lambda_k^{3/2} > 1/80", Comparison::Greater,
                                      1.0 / 80.0, "regions_ms/R2pp", spread, labelled(Region::MS_R2pp), grad_norm},
                                     config));
  report.checks.push_back(run_region({Region::MS_R3p, "|grad g| / lambda_k^{3/2} > 1/(60 kappa)", Comparison::Greater,
                                      1.0 / (60.0 * kappa), "regions_ms/R3p", spread, labelled(Region::MS_R3p),
                                      grad_norm},
                                     config));
  report.checks.push_back(run_region({Region::MS_R3pp, "|grad g| / lambda_k^{3/2} > (5/84) k^{1/4}",
                                      Comparison::Greater, 5.0 / 84.0 * std::pow(static_cast<double>(k), 0.25),
                                      "regions_ms/R3pp", spread, labelled(Region::MS_R3pp), grad_norm},
                                     config));
  return report;
}

BoundReport verify_region_bounds_pr(const Vector& xstar, const SamplerConfig& config) {
  const double n = xstar.norm();
  if (!(n > 0.0)) throw Error(ErrorCode::ZeroTruthSignal, "verify_region_bounds_pr: x* = 0");
  const Eigen::Index dim = xstar.size();
  const auto pop = std::make_shared<risk::PrPopulation>(xstar);
  const double s = n * n;

  BoundReport report;
  report.family = "phase_retrieval";
  report.config = config;

  auto labelled = [xstar](Region region) {
    return [xstar, region](const Matrix& x) { return classify_region_pr(xstar, x.col(0)).contains(region); };
  };
  auto curvature = [pop, s](const Matrix& x) { return spectral::min_eig_symmetric(pop->hessian(x.col(0))).value / s; };
  auto grad_norm = [pop, n](const Matrix& x) { return pop->euclidean_grad(x).norm() / (n * n * n); };

  report.checks.push_back(run_region({Region::PR_R1, "lambda_min / |x*|^2 <= -1.5", Comparison::AtMost, -1.5,
                                      "regions_pr/R1",
                                      [dim, n](RngStream& rng) -> std::optional<Matrix> {
                                        return as_matrix(rng.in_ball(dim, 0.5 * n));
                                      },
                                      labelled(Region::PR_R1), curvature},
                                     config));
  report.checks.push_back(run_region({Region::PR_R2, "lambda_min / |x*|^2 >= 0.22", Comparison::AtLeast, 0.22,
                                      "regions_pr/R2",
                                      [xstar, dim, n](RngStream& rng) -> std::optional<Matrix> {
                                        const double sign = rng.uniform() < 0.5 ? 1.0 : -1.0;
                                        return as_matrix(sign * xstar + rng.in_ball(dim, 0.1 * n));
                                      },
                                      labelled(Region::PR_R2), curvature},
                                     config));
  if (dim == 1) {
    report.checks.push_back(skipped_check(Region::PR_R3, "lambda_min / |x*|^2 <= -0.78", Comparison::AtMost, -0.78,
                                          "N = 1: the saddle circle is empty"));
  } else {
    const Vector unit = xstar / n;
    report.checks.push_back(run_region({Region::PR_R3, "lambda_min / |x*|^2 <= -0.78", Comparison::AtMost, -0.78,
                                        "regions_pr/R3",
                                        [unit, dim, n](RngStream& rng) -> std::optional<Matrix> {
                                          Vector w = rng.gaussian_vector(dim);
                                          w -= w.dot(unit) * unit;
                                          if (w.norm() == 0.0) return std::nullopt;
                                          w *= n / std::sqrt(3.0) / w.norm();
                                          return as_matrix(w + rng.in_ball(dim, 0.2 * n));
                                        },
                                        labelled(Region::PR_R3), curvature},
                                       config));
  }
  report.checks.push_back(run_region({Region::PR_R4, "|grad g| / |x*|^3 > 0.3963", Comparison::Greater, 0.3963,
                                      "regions_pr/R4",
                                      [dim, n](RngStream& rng) -> std::optional<Matrix> {
                                        return as_matrix(rng.in_ball(dim, 1.5 * n));
                                      },
                                      labelled(Region::PR_R4), grad_norm},
                                     config));
  return report;
}

Matrix sample_ball(const risk::RiskModel& model, double l, RngStream& rng) {
  const Eigen::Index rows = model.rows();
  const Eigen::Index cols = model.cols();
  if (!model.factor_domain()) return as_matrix(rng.in_ball(rows, l));
  const Matrix g = rng.gaussian_matrix(rows, cols);
  const double gauge = std::sqrt((g * g.transpose()).norm());
  const double target = std::sqrt(l) * std::pow(rng.uniform_open_left(), 1.0 / static_cast<double>(rows * cols));
  return g * (target / gauge);
}

double hessian_difference_norm(const risk::RiskModel& a, const risk::RiskModel& b, const Matrix& p) {
  Matrix diff;
  if (a.factor_domain() && p.cols() > 1) {
    const Matrix basis = manifold::horizontal_basis_matrix(manifold::FactorPoint(p));
    diff = spectral::restricted_hessian(a, p, basis) - spectral::restricted_hessian(b, p, basis);
  } else {
    diff = spectral::dense_hessian(a, p) - spectral::dense_hessian(b, p);
  }
  if (!diff.allFinite()) throw Error(ErrorCode::NonFiniteEntry, "hessian_difference_norm");
  const Vector eig = Eigen::SelfAdjointEigenSolver<Matrix>(diff, Eigen::EigenvaluesOnly).eigenvalues();
  return eig.cwiseAbs().maxCoeff();
}

AssumptionReport check_assumptions(const risk::RiskModel& pop, const risk::RiskModel& emp,
                                   const AssumptionConfig& config) {
  if (!(config.epsilon > 0.0) || !(config.eta > 0.0) || !(config.ball_radius > 0.0)) {
    throw Error(ErrorCode::InvalidConfig, "check_assumptions: epsilon, eta and l must be positive");
  }
  if (config.n_samples == 0) throw Error(ErrorCode::InvalidConfig, "check_assumptions: n_samples must be positive");
  if (pop.rows() != emp.rows() || pop.cols() != emp.cols() || pop.factor_domain() != emp.factor_domain()) {
    throw Error(ErrorCode::DimensionMismatch, "check_assumptions: models live on different domains");
  }

  AssumptionReport report;
  report.config = config;
  report.n_samples = config.n_samples;
  const bool quotient = pop.factor_domain() && pop.cols() > 1;
  for (std::size_t i = 0; i < config.n_samples; ++i) {
    RngStream rng(config.seed, "assumptions", i);
    Matrix p = sample_ball(pop, config.ball_radius, rng);
    while (quotient && !try_factor(p)) p = sample_ball(pop, config.ball_radius, rng);

    const Matrix grad_g = risk::domain_grad(pop, p);
    const double grad_diff = (risk::domain_grad(emp, p) - grad_g).norm();
    const double hess_diff = hessian_difference_norm(emp, pop, p);
    if (!std::isfinite(grad_diff) || !std::isfinite(hess_diff)) {
      throw Error(ErrorCode::NonFiniteEntry, "check_assumptions: non-finite deviation");
    }
    report.sup_grad_diff_est = std::max(report.sup_grad_diff_est, grad_diff);
    report.sup_hess_diff_est = std::max(report.sup_hess_diff_est, hess_diff);

    if (grad_g.norm() <= config.epsilon) {
      ++report.n_in_small_gradient_set;
      if (std::abs(spectral::min_eig_domain(pop, p).lambda_min) < config.eta) {
        report.assumption1_violations.push_back(p);
      }
    }
  }
  report.curvature = report.assumption1_violations.empty() ? Verdict::Pass : Verdict::Fail;
  report.gradient_proximity = report.sup_grad_diff_est <= config.epsilon / 2.0 ? Verdict::Pass : Verdict::Fail;
  report.hessian_proximity = report.sup_hess_diff_est <= config.eta / 2.0 ? Verdict::Pass : Verdict::Fail;
  return report;
}

double rip_deviation(const risk::SensingEnsemble& ensemble, const Matrix& z) {
  const double zz = z.squaredNorm();
  if (!(zz > 0.0)) throw Error(ErrorCode::InvalidRank, "rip_deviation: Z = 0");
  return std::abs(ensemble.apply(z).squaredNorm() / zz - 1.0);
}

RipReport estimate_rip(const risk::SensingEnsemble& ensemble, Eigen::Index rank_bound, std::size_t n_probes,
                       std::uint64_t seed) {
  const Eigen::Index n = ensemble.dim();
  if (rank_bound < 1 || rank_bound > n) {
    throw Error(ErrorCode::InvalidRank, "estimate_rip: rank bound " + std::to_string(rank_bound) +
                                            " outside [1, " + std::to_string(n) + "]");
  }
  RipReport report;
  report.rank_bound = rank_bound;
  report.n_probes = n_probes;
  report.seed = seed;
  report.n_measurements = ensemble.size();
  const Eigen::Index plus = (rank_bound + 1) / 2;
  const Eigen::Index minus = rank_bound - plus;
  for (std::size_t i = 0; i < n_probes; ++i) {
    RngStream rng(seed, "rip_probe", i);
    const Matrix g = rng.gaussian_matrix(n, plus);
    Matrix z = g * g.transpose();
    if (minus > 0) {
      const Matrix h = rng.gaussian_matrix(n, minus);
      z -= h * h.transpose();
    }
    z /= z.norm();
    report.delta_est = std::max(report.delta_est, rip_deviation(ensemble, z));
  }
  return report;
}

double rip_threshold_from_lemma(const risk::SensingGroundTruth& truth, double epsilon, double eta) {
  const Matrix ustar = truth.global_minimizer();
  const double m = (ustar * ustar.transpose()).norm();
  const double x = truth.target().norm();
  const double k = static_cast<double>(truth.target_rank());
  const double eps_term =
      epsilon / (2.0 * std::sqrt(8.0 / 7.0) * std::pow(k, 0.25) * (8.0 / 7.0 * m + x) * std::sqrt(m));
  const double eta_term = eta / (2.0 * (16.0 / 7.0 * std::sqrt(k) * m + 8.0 / 7.0 * m + x));
  return std::min({eps_term, 1.0 / 36.0, eta_term});
}

Thresholds sensing_thresholds(const risk::SensingGroundTruth& truth) {
  const double lk = truth.lambda_k();
  const Matrix ustar = truth.global_minimizer();
  return {std::min(1.0 / 80.0, 1.0 / (60.0 * truth.kappa())) * std::pow(lk, 1.5), 0.06 * lk,
          8.0 / 7.0 * (ustar * ustar.transpose()).norm()};
}

Thresholds phase_thresholds(const Vector& xstar) {
  const double n = xstar.norm();
  if (!(n > 0.0)) throw Error(ErrorCode::ZeroTruthSignal, "phase_thresholds: x* = 0");
  return {0.3963 * n * n * n, 0.22 * n * n, 1.1 * n};
}

nlohmann::json to_json(const RegionLabelSet& labels) {
  nlohmann::json names = nlohmann::json::array();
  for (Region r : labels.labels) names.push_back(std::string(to_string(r)));
  return {{"labels", names}, {"witness", labels.witness}, {"advisory", labels.advisory}};
}

nlohmann::json to_json(const BoundReport& report) {
  nlohmann::json checks = nlohmann::json::array();
  for (const RegionCheck& c : report.checks) {
    nlohmann::json j = {{"region", std::string(to_string(c.region))},
                        {"property", c.property},
                        {"comparison", comparison_symbol(c.comparison)},
                        {"bound", c.bound},
                        {"skipped", c.skipped},
                        {"pass", c.pass()}};
    if (c.skipped) {
      j["note"] = c.note;
    } else {
      j["accepted"] = c.accepted;
      j["attempts"] = c.attempts;
      j["violations"] = c.violations;
      j["worst"] = c.worst;
      j["worst_margin"] = c.worst_margin;
      j["worst_point"] = matrix_json(c.worst_point);
    }
    checks.push_back(j);
  }
  return {{"family", report.family},
          {"seed", report.config.seed},
          {"samples_per_region", report.config.samples_per_region},
          {"attempts_per_sample", report.config.attempts_per_sample},
          {"advisory", report.advisory},
          {"checks", checks},
          {"pass", report.pass()}};
}

nlohmann::json to_json(const AssumptionReport& report) {
  nlohmann::json violations = nlohmann::json::array();
  for (const Matrix& p : report.assumption1_violations) violations.push_back(matrix_json(p));
  return {{"epsilon", report.config.epsilon},
          {"eta", report.config.eta},
          {"ball_radius", report.config.ball_radius},
          {"seed", report.config.seed},
          {"n_samples", report.n_samples},
          {"n_in_small_gradient_set", report.n_in_small_gradient_set},
          {"sup_grad_diff_est", report.sup_grad_diff_est},
          {"sup_hess_diff_est", report.sup_hess_diff_est},
          {"assumption1_violations", violations},
          {"verdicts",
           {{"curvature", std::string(to_string(report.curvature))},
            {"gradient_proximity", std::string(to_string(report.gradient_proximity))},
            {"hessian_proximity", std::string(to_string(report.hessian_proximity))}}},
          {"caveat", report.caveat}};
}

nlohmann::json to_json(const RipReport& report) {
  nlohmann::json j = {{"rank_bound", report.rank_bound},     {"n_probes", report.n_probes},
                      {"seed", report.seed},                 {"M", report.n_measurements},
                      {"delta_est", report.delta_est},       {"caveat", report.caveat}};
  j["threshold_from_lemma"] = report.threshold_from_lemma ? nlohmann::json(*report.threshold_from_lemma) : nullptr;
  return j;
}

}  // namespace landscape_lab::landscape
