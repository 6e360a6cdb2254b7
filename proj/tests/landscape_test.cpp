#include "landscape_lab/landscape.hpp"
#include "landscape_lab/rng.hpp"
#include "landscape_lab/spectral.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <memory>
#include <numbers>

namespace landscape_lab::landscape {
namespace {

using risk::SensingGroundTruth;

Vector vec(std::initializer_list<double> values) {
  Vector v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double x : values) v(i++) = x;
  return v;
}

const SensingGroundTruth& separated_truth() {
  static const SensingGroundTruth truth = SensingGroundTruth::axis_aligned(8, vec({1.0, 1.0, 1.0 / 12.0}), 2);
  return truth;
}

TEST(ClassifyRegionMs, NamedPoints) {
  const auto& truth = separated_truth();
  const Matrix ustar = truth.global_minimizer();

  const auto at_min = classify_region_ms(truth, manifold::FactorPoint(ustar));
  EXPECT_EQ(at_min.labels, std::set<Region>{Region::MS_R1});
  EXPECT_EQ(at_min.witness.at("procrustes_distance"), 0.0);

  EXPECT_TRUE(classify_region_ms(truth, manifold::FactorPoint(2.0 * ustar)).contains(Region::MS_R3pp));

  const auto saddle = classify_region_ms(truth, manifold::FactorPoint(truth.factor_for({0, 2})));
  EXPECT_TRUE(saddle.contains(Region::MS_R2p));
  EXPECT_NEAR(saddle.witness.at("sigma_k"), std::sqrt(1.0 / 12.0), 1e-14);
  EXPECT_EQ(saddle.witness.at("grad_norm"), 0.0);

  EXPECT_THROW(classify_region_ms(truth, manifold::FactorPoint(Matrix::Identity(8, 3))), Error);
}

TEST(ClassifyRegionMs, AdvisoryForCloseSpectra) {
  const auto close = SensingGroundTruth::axis_aligned(6, vec({1.0, 0.5, 0.4}), 2);
  EXPECT_TRUE(classify_region_ms(close, manifold::FactorPoint(close.global_minimizer())).advisory);
  const auto distinct = SensingGroundTruth::axis_aligned(6, vec({2.0, 1.0, 0.05}), 2);
  EXPECT_FALSE(classify_region_ms(distinct, manifold::FactorPoint(distinct.global_minimizer())).advisory);
}

TEST(ClassifyRegionMs, RegionsCoverRandomPoints) {
  RngStream rng(1);
  const SensingGroundTruth truth(rng.stiefel(6, 3), vec({2.0, 1.0, 0.05}), 2);
  const double scale = std::sqrt(truth.lambda_k());
  for (int t = 0; t < 10000; ++t) {
    const Matrix u = rng.gaussian_matrix(6, 2, scale * 3.0 * rng.uniform());
    EXPECT_FALSE(classify_region_ms(truth, manifold::FactorPoint(u)).labels.empty());
  }
}

TEST(ClassifyRegionPr, NamedPoints) {
  const Vector xstar = vec({1.0, -1.0, 0.5});
  const double n = xstar.norm();
  EXPECT_TRUE(classify_region_pr(xstar, Vector::Zero(3)).contains(Region::PR_R1));
  EXPECT_EQ(classify_region_pr(xstar, xstar).labels, std::set<Region>{Region::PR_R2});
  EXPECT_EQ(classify_region_pr(xstar, -xstar).labels, std::set<Region>{Region::PR_R2});

  Vector w = vec({1.0, 1.0, 0.0}) / std::sqrt(2.0);
  const auto circle = classify_region_pr(xstar, n / std::sqrt(3.0) * w);
  EXPECT_EQ(circle.labels, std::set<Region>{Region::PR_R3});
  EXPECT_NEAR(circle.witness.at("dist_saddle_circle"), 0.0, 1e-15);

  EXPECT_EQ(classify_region_pr(xstar, 3.0 * xstar).labels, std::set<Region>{Region::PR_R4});
  EXPECT_THROW(classify_region_pr(Vector::Zero(3), xstar), Error);
}

TEST(ClassifyRegionPr, SaddleDistanceMatchesBruteForce) {
  // N = 3 with x* along e_3: the circle is {r (cos t, sin t, 0)}.
  const Vector xstar = vec({0.0, 0.0, 2.0});
  const double radius = 2.0 / std::sqrt(3.0);
  RngStream rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    const Vector x = rng.gaussian_vector(3, 1.5);
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 20000; ++i) {
      const double t = 2.0 * std::numbers::pi * i / 20000.0;
      best = std::min(best, (x - radius * vec({std::cos(t), std::sin(t), 0.0})).norm());
    }
    EXPECT_NEAR(saddle_circle_distance(xstar, x), best, 1e-6);
  }
  EXPECT_NEAR(saddle_circle_distance(xstar, vec({0.0, 0.0, 1.0})), std::sqrt(1.0 + 4.0 / 3.0), 1e-15);
}

TEST(ClassifyRegionPr, CoverageAndMinimumNeighbourhoodCurvature) {
  RngStream rng(3);
  const Vector xstar = rng.gaussian_vector(3);
  const risk::PrPopulation g(xstar);
  const double s = xstar.squaredNorm();
  for (int t = 0; t < 10000; ++t) {
    const Vector x = rng.in_ball(3, 1.6 * std::sqrt(s));
    const auto labels = classify_region_pr(xstar, x);
    ASSERT_FALSE(labels.labels.empty());
    EXPECT_EQ(labels.contains(Region::PR_R4), labels.labels.size() == 1 && *labels.labels.begin() == Region::PR_R4);
  }
  for (int t = 0; t < 500; ++t) {
    const Vector x = (t % 2 ? 1.0 : -1.0) * xstar + rng.in_ball(3, 0.1 * std::sqrt(s));
    if (!classify_region_pr(xstar, x).contains(Region::PR_R2)) continue;
    EXPECT_GE(spectral::min_eig_symmetric(g.hessian(x)).value, 0.22 * s);
  }
}

TEST(VerifyRegionBounds, PhaseRetrievalPasses) {
  RngStream rng(4);
  SamplerConfig config;
  config.samples_per_region = 1000;
  config.seed = 11;
  const auto report = verify_region_bounds_pr(rng.gaussian_vector(3), config);
  ASSERT_EQ(report.checks.size(), 4u);
  for (const auto& c : report.checks) {
    EXPECT_EQ(c.accepted, 1000u) << to_string(c.region);
    EXPECT_EQ(c.violations, 0u) << to_string(c.region) << " worst " << c.worst;
  }
  EXPECT_TRUE(report.pass());
}

TEST(VerifyRegionBounds, PhaseRetrievalOneDimensionSkipsCircle) {
  SamplerConfig config;
  config.samples_per_region = 100;
  const auto report = verify_region_bounds_pr(vec({1.0}), config);
  EXPECT_TRUE(report.checks[2].skipped);
  EXPECT_TRUE(report.pass());
}

TEST(VerifyRegionBounds, SensingNeighbourhoodOfMinimum) {
  const auto truth = SensingGroundTruth::axis_aligned(6, vec({1.5, 1.0}), 2);
  SamplerConfig config;
  config.samples_per_region = 500;
  config.seed = 5;
  const auto report = verify_region_bounds_ms(truth, config);
  EXPECT_EQ(report.checks[0].region, Region::MS_R1);
  EXPECT_EQ(report.checks[0].violations, 0u);
  EXPECT_GE(report.checks[0].worst, 0.19);
  EXPECT_TRUE(report.checks[1].skipped);
  EXPECT_TRUE(report.pass());
}

TEST(VerifyRegionBounds, SensingAllRegions) {
  SamplerConfig config;
  config.samples_per_region = 200;
  config.seed = 6;
  const auto report = verify_region_bounds_ms(separated_truth(), config);
  ASSERT_EQ(report.checks.size(), 5u);
  for (const auto& c : report.checks) {
    EXPECT_FALSE(c.skipped);
    EXPECT_EQ(c.violations, 0u) << to_string(c.region) << " worst " << c.worst;
  }
  EXPECT_THROW(verify_region_bounds_ms(SensingGroundTruth::axis_aligned(6, vec({1.0, 0.5, 0.4}), 2), config), Error);
}

TEST(VerifyRegionBounds, StarvedSamplerThrows) {
  SamplerConfig config;
  config.samples_per_region = 100;
  config.attempts_per_sample = 1;
  try {
    verify_region_bounds_pr(vec({1.0, -1.0}), config);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SamplerStarved);
  }
}

TEST(SampleBall, StaysInsideBall) {
  RngStream rng(7);
  const risk::MsPopulation ms(separated_truth());
  const risk::PrPopulation pr(vec({1.0, 2.0}));
  for (int t = 0; t < 1000; ++t) {
    const Matrix u = sample_ball(ms, 1.3, rng);
    EXPECT_LE((u * u.transpose()).norm(), 1.3 * (1.0 + 1e-12));
    EXPECT_LE(sample_ball(pr, 0.7, rng).norm(), 0.7 * (1.0 + 1e-12));
  }
}

TEST(CheckAssumptions, IdenticalModelsHaveZeroDeviation) {
  const Vector xstar = vec({1.0, -1.0});
  const risk::PrPopulation g(xstar);
  const auto th = phase_thresholds(xstar);
  const auto report = check_assumptions(g, g, {th.epsilon, th.eta, th.ball_radius, 300, 1});
  EXPECT_EQ(report.sup_grad_diff_est, 0.0);
  EXPECT_EQ(report.sup_hess_diff_est, 0.0);
  EXPECT_TRUE(report.pass());
  EXPECT_EQ(report.caveat, "Monte-Carlo lower bound of supremum");

  const risk::MsPopulation ms(separated_truth());
  const auto ts = sensing_thresholds(separated_truth());
  const auto ms_report = check_assumptions(ms, ms, {ts.epsilon, ts.eta, ts.ball_radius, 100, 2});
  EXPECT_EQ(ms_report.sup_grad_diff_est, 0.0);
  EXPECT_EQ(ms_report.sup_hess_diff_est, 0.0);
}

TEST(CheckAssumptions, DefaultThresholdsForPhaseRetrieval) {
  const Vector xstar = vec({1.0, -1.0});
  const auto th = phase_thresholds(xstar);
  const double n = std::sqrt(2.0);
  EXPECT_DOUBLE_EQ(th.epsilon, 0.3963 * n * n * n);
  EXPECT_DOUBLE_EQ(th.eta, 0.22 * 2.0);
  EXPECT_DOUBLE_EQ(th.ball_radius, 1.1 * n);
}

TEST(CheckAssumptions, ProximityNeedsVeryLargeSamples) {
  // Fourth powers of Gaussians make the deviations decay slowly: at M = 2000
  // both proximity checks fail; at M = 200000 the gradient check passes.
  const Vector xstar = vec({1.0, -1.0});
  const risk::PrPopulation g(xstar);
  const auto th = phase_thresholds(xstar);
  const risk::PrEmpirical small(std::make_shared<risk::PhaseProblem>(risk::generate_phase_problem(xstar, 2000, 42)));
  const auto report = check_assumptions(g, small, {th.epsilon, th.eta, th.ball_radius, 2000, 3});
  EXPECT_EQ(report.gradient_proximity, Verdict::Fail) << report.sup_grad_diff_est;
  EXPECT_EQ(report.hessian_proximity, Verdict::Fail) << report.sup_hess_diff_est;
  EXPECT_EQ(report.curvature, Verdict::Pass);
  EXPECT_GT(report.n_in_small_gradient_set, 0u);

  const risk::PrEmpirical large(
      std::make_shared<risk::PhaseProblem>(risk::generate_phase_problem(xstar, 200000, 42)));
  const auto big = check_assumptions(g, large, {th.epsilon, th.eta, th.ball_radius, 200, 3});
  EXPECT_EQ(big.gradient_proximity, Verdict::Pass) << big.sup_grad_diff_est;
  EXPECT_LT(big.sup_hess_diff_est, report.sup_hess_diff_est);
}

TEST(CheckAssumptions, RejectsInvalidConfig) {
  const risk::PrPopulation g(vec({1.0, -1.0}));
  const risk::PrPopulation other(vec({1.0, -1.0, 0.0}));
  try {
    check_assumptions(g, g, {0.0, 1.0, 1.0, 10, 0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidConfig);
  }
  EXPECT_THROW(check_assumptions(g, g, {1.0, -1.0, 1.0, 10, 0}), Error);
  EXPECT_THROW(check_assumptions(g, g, {1.0, 1.0, 0.0, 10, 0}), Error);
  EXPECT_THROW(check_assumptions(g, other, {1.0, 1.0, 1.0, 10, 0}), Error);
}

TEST(HessianDifference, MatchesClosedFormForPhaseRetrieval) {
  RngStream rng(8);
  const Vector xstar = rng.gaussian_vector(3);
  const risk::PrPopulation g(xstar);
  const risk::PrEmpirical f(std::make_shared<risk::PhaseProblem>(risk::generate_phase_problem(xstar, 40, 1)));
  for (int t = 0; t < 10; ++t) {
    const Vector x = rng.gaussian_vector(3);
    const Matrix diff = f.hessian(x) - g.hessian(x);
    const Vector eig = Eigen::SelfAdjointEigenSolver<Matrix>(diff).eigenvalues();
    EXPECT_NEAR(hessian_difference_norm(f, g, Matrix(x)), std::max(-eig(0), eig(2)), 1e-10 * diff.norm());
  }
}

TEST(Rip, SingleMatrixOperators) {
  Matrix z = Matrix::Zero(3, 3);
  z(0, 0) = 1.0;
  z(1, 1) = 1.0;
  z(0, 1) = z(1, 0) = 0.5;
  const Matrix a = z / z.norm();
  const risk::SensingEnsemble aligned({a}, Matrix::Zero(3, 3), 0);
  EXPECT_NEAR(rip_deviation(aligned, z), 0.0, 1e-15);

  Matrix e11 = Matrix::Zero(3, 3);
  e11(0, 0) = 1.0;
  const risk::SensingEnsemble single({e11}, Matrix::Zero(3, 3), 0);
  // |A(Z)|^2 / |Z|^2 = 1 / 2.5.
  EXPECT_NEAR(rip_deviation(single, z), 1.0 - 1.0 / 2.5, 1e-15);
}

TEST(Rip, ConcentratesForLargeM) {
  const auto truth = SensingGroundTruth::axis_aligned(4, vec({1.0, 0.5}), 2);
  const auto ens = risk::generate_sensing_ensemble(truth, 10000, 5);
  const auto report = estimate_rip(ens, 2, 200, 9);
  EXPECT_GE(report.delta_est, 0.0);
  EXPECT_LE(report.delta_est, 0.2);
  EXPECT_EQ(report.n_measurements, 10000);
  try {
    estimate_rip(ens, 5, 10, 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidRank);
  }
  EXPECT_THROW(estimate_rip(ens, 0, 10, 0), Error);
}

TEST(Rip, ThresholdFormula) {
  // k = 1, X = U*U*^T = 1 (N = 2): |U*U*^T| = |X| = 1.
  const auto truth = SensingGroundTruth::axis_aligned(2, vec({1.0}), 1);
  const double eps_term = 0.1 / (2.0 * std::sqrt(8.0 / 7.0) * (15.0 / 7.0));
  const double eta_term = 0.01 / (2.0 * (16.0 / 7.0 + 8.0 / 7.0 + 1.0));
  EXPECT_DOUBLE_EQ(rip_threshold_from_lemma(truth, 0.1, 0.01), std::min(eps_term, eta_term));
  EXPECT_DOUBLE_EQ(rip_threshold_from_lemma(truth, 100.0, 100.0), 1.0 / 36.0);
}

TEST(Json, ReportsSerialize) {
  const Vector xstar = vec({1.0, -1.0});
  const auto labels = to_json(classify_region_pr(xstar, xstar));
  EXPECT_EQ(labels["labels"][0], "PR_R2");
  SamplerConfig config;
  config.samples_per_region = 20;
  const auto bounds = to_json(verify_region_bounds_pr(xstar, config));
  EXPECT_EQ(bounds["checks"].size(), 4u);
  EXPECT_TRUE(bounds["pass"].get<bool>());
  const risk::PrPopulation g(xstar);
  const auto th = phase_thresholds(xstar);
  const auto a = to_json(check_assumptions(g, g, {th.epsilon, th.eta, th.ball_radius, 10, 0}));
  EXPECT_EQ(a["verdicts"]["gradient_proximity"], "PASS");
  EXPECT_EQ(a["caveat"], "Monte-Carlo lower bound of supremum");
}

}  // namespace
}  // namespace landscape_lab::landscape
