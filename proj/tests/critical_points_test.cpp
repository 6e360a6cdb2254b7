#include "landscape_lab/critical_points.hpp"
#include "landscape_lab/landscape.hpp"
#include "landscape_lab/rng.hpp"
#include "landscape_lab/spectral.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <memory>

namespace landscape_lab::critical {
namespace {

using risk::SensingGroundTruth;

Vector vec(std::initializer_list<double> values) {
  Vector v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double x : values) v(i++) = x;
  return v;
}

std::size_t count_kind(const std::vector<CriticalPointRecord>& records, Kind kind) {
  return static_cast<std::size_t>(
      std::count_if(records.begin(), records.end(), [kind](const auto& r) { return r.kind == kind; }));
}

TEST(AnalyticMs, FullRankHasSingleMinimum) {
  const auto truth = SensingGroundTruth::axis_aligned(5, vec({2.0, 1.0}), 2);
  const auto points = analytic_critical_points_ms(truth);
  ASSERT_EQ(points.size(), 1u);
  EXPECT_EQ(points[0].kind, Kind::LocalMin);
  EXPECT_EQ(points[0].label, "eig{1,2}");
}

TEST(AnalyticMs, ThreeChooseTwoAllCritical) {
  RngStream rng(3);
  const SensingGroundTruth truth(rng.stiefel(8, 3), vec({1.0, 0.6, 1.0 / 12.0}), 2);
  const risk::MsPopulation model(truth);
  const auto points = analytic_critical_points_ms(truth);
  ASSERT_EQ(points.size(), 3u);
  EXPECT_EQ(points[0].kind, Kind::LocalMin);
  EXPECT_EQ(points[1].kind, Kind::StrictSaddle);
  EXPECT_EQ(points[2].kind, Kind::StrictSaddle);
  for (const auto& p : points) {
    EXPECT_LE(model.euclidean_grad(p.location).norm(), 1e-12) << p.label;
    const double lmin = spectral::min_eig_domain(model, p.location).lambda_min;
    EXPECT_EQ(classify(lmin, default_tolerances(model).eig), p.kind) << p.label;
  }
}

TEST(AnalyticPr, OneDimensional) {
  const auto points = analytic_critical_points_pr(vec({1.3}));
  ASSERT_EQ(points.size(), 3u);
  EXPECT_EQ(points[0].location(0, 0), 0.0);
  EXPECT_EQ(points[1].location(0, 0), 1.3);
  EXPECT_EQ(points[2].location(0, 0), -1.3);
}

TEST(AnalyticPr, TwoDimensionalSaddles) {
  const Vector xstar = vec({1.0, -1.0});
  const risk::PrPopulation model(xstar);
  const auto points = analytic_critical_points_pr(xstar);
  ASSERT_EQ(points.size(), 5u);
  const Vector what = vec({1.0, 1.0}) / std::sqrt(2.0);
  for (const auto& p : points) {
    EXPECT_LE(model.euclidean_grad(p.location).norm(), 1e-12) << p.label;
    if (p.label.find("circle") != std::string::npos) {
      const Vector x = p.location.col(0);
      EXPECT_NEAR(std::abs(x.dot(what)), std::sqrt(2.0 / 3.0), 1e-14);
      EXPECT_NEAR(x.dot(xstar), 0.0, 1e-14);
    }
  }
  EXPECT_THROW(analytic_critical_points_pr(Vector::Zero(2)), Error);
}

TEST(AnalyticRankOne, OriginIsStrictSaddleByRule) {
  const Vector xstar = vec({1.0, -1.0});
  const risk::MsPopulation model(SensingGroundTruth::rank_one(xstar));
  for (const auto& p : analytic_critical_points_rank1_sensing(xstar)) {
    EXPECT_LE(model.euclidean_grad(p.location).norm(), 1e-12);
    const double lmin = spectral::min_eig_domain(model, p.location).lambda_min;
    EXPECT_EQ(classify(lmin, default_tolerances(model).eig), p.kind) << p.label;
  }
  EXPECT_NEAR(spectral::min_eig_domain(model, Matrix::Zero(2, 1)).lambda_min, -2.0, 1e-12);
}

TEST(Classify, DegenerateBand) {
  EXPECT_EQ(classify(1e-3, 1e-2), Kind::Degenerate);
  EXPECT_EQ(classify(-1e-3, 1e-2), Kind::Degenerate);
  EXPECT_EQ(classify(0.5, 1e-2), Kind::LocalMin);
  EXPECT_EQ(classify(-0.5, 1e-2), Kind::StrictSaddle);
}

TEST(GridSeeds, LayoutAndValidation) {
  const auto seeds = grid_seeds(2, -2.0, 2.0, 41);
  ASSERT_EQ(seeds.size(), 41u * 41u);
  EXPECT_EQ(seeds.front()(0, 0), -2.0);
  EXPECT_EQ(seeds.back()(1, 0), 2.0);
  EXPECT_THROW(grid_seeds(2, -2.0, 2.0, 1), Error);
  EXPECT_THROW(grid_seeds(2, 1.0, 1.0, 5), Error);
}

/// Each analytic point has exactly one record within tau_dedupe and no record is unexplained.
void expect_same_set(const SearchResult& found, const std::vector<AnalyticPoint>& analytic, double tau) {
  ASSERT_EQ(found.records.size(), analytic.size());
  for (const auto& a : analytic) {
    const auto hits = std::count_if(found.records.begin(), found.records.end(),
                                    [&](const auto& r) { return (r.location - a.location).norm() <= tau; });
    EXPECT_EQ(hits, 1) << a.label;
    for (const auto& r : found.records) {
      if ((r.location - a.location).norm() <= tau) EXPECT_EQ(r.kind, a.kind) << a.label;
    }
  }
}

TEST(FindCriticalPoints, PhaseRetrievalGridIsComplete) {
  const Vector xstar = vec({1.0, -1.0});
  const risk::PrPopulation model(xstar);
  SearchConfig config;
  config.seeds = grid_seeds(2, -2.0, 2.0, 41);
  const auto result = find_critical_points(model, config);
  EXPECT_TRUE(result.failures.empty());
  for (const auto& r : result.records) EXPECT_LE(r.grad_norm, 1e-8);
  expect_same_set(result, analytic_critical_points_pr(xstar), default_tolerances(model).dedupe);
}

TEST(FindCriticalPoints, RankOneSensingGridIsComplete) {
  const Vector xstar = vec({1.0, -1.0});
  const risk::MsPopulation model(SensingGroundTruth::rank_one(xstar));
  SearchConfig config;
  config.seeds = grid_seeds(2, -2.0, 2.0, 41);
  const auto result = find_critical_points(model, config);
  for (const auto& r : result.records) EXPECT_LE(r.grad_norm, 1e-8);
  expect_same_set(result, analytic_critical_points_rank1_sensing(xstar), default_tolerances(model).dedupe);
}

TEST(FindCriticalPoints, PhaseRetrievalOneDimensional) {
  const Vector xstar = vec({1.0});
  const risk::PrPopulation model(xstar);
  SearchConfig config;
  config.seeds = grid_seeds(1, -2.0, 2.0, 41);
  expect_same_set(find_critical_points(model, config), analytic_critical_points_pr(xstar),
                  default_tolerances(model).dedupe);
}

TEST(FindCriticalPoints, SensingFactorQuotient) {
  const auto truth = SensingGroundTruth::axis_aligned(4, vec({1.0, 0.5, 0.05}), 2);
  const risk::MsPopulation model(truth);
  const auto analytic = analytic_critical_points_ms(truth);
  SearchConfig config;
  RngStream rng(11);
  for (const auto& a : analytic) {
    for (int j = 0; j < 3; ++j) config.seeds.push_back(a.location * rng.orthogonal(2) + rng.gaussian_matrix(4, 2, 0.01));
  }
  const auto result = find_critical_points(model, config);
  ASSERT_EQ(result.records.size(), analytic.size());
  for (const auto& a : analytic) {
    const auto hit = std::count_if(result.records.begin(), result.records.end(), [&](const auto& r) {
      return manifold::procrustes_distance(r.location, a.location) <= 1e-6;
    });
    EXPECT_EQ(hit, 1) << a.label;
  }
}

std::shared_ptr<const risk::PhaseProblem> frozen_problem(Eigen::Index m, std::uint64_t seed) {
  return std::make_shared<const risk::PhaseProblem>(risk::generate_phase_problem(vec({1.0, -1.0}), m, seed));
}

TEST(FindCriticalPoints, EmpiricalRecordsReverify) {
  const risk::PrEmpirical model(frozen_problem(10, 1));
  SearchConfig config;
  config.seeds = grid_seeds(2, -2.0, 2.0, 41);
  const auto result = find_critical_points(model, config);
  const Tolerances tol = default_tolerances(model);
  ASSERT_FALSE(result.records.empty());
  for (const auto& r : result.records) {
    const Vector x = r.location.col(0);
    const auto& a = model.problem().vectors();
    const Vector inner_products = a * x;
    Vector g = Vector::Zero(2);
    for (Eigen::Index m = 0; m < a.rows(); ++m) {
      g += (2.0 / 10.0) * (inner_products(m) * inner_products(m) - model.problem().measurements()(m)) *
           inner_products(m) * a.row(m).transpose();
    }
    EXPECT_LE(g.norm(), tol.crit);
    if (r.kind == Kind::LocalMin) {
      EXPECT_GE(Eigen::SelfAdjointEigenSolver<Matrix>(model.hessian(x)).eigenvalues()(0), tol.eig);
    }
  }
}

TEST(FindCriticalPoints, PhaseRetrievalSignSymmetry) {
  const risk::PrEmpirical model(frozen_problem(10, 4));
  SearchConfig config;
  config.seeds = grid_seeds(2, -2.0, 2.0, 41);
  const auto result = find_critical_points(model, config);
  const double tau = default_tolerances(model).dedupe;
  for (const auto& r : result.records) {
    const auto mirror = std::count_if(result.records.begin(), result.records.end(),
                                      [&](const auto& s) { return (s.location + r.location).norm() <= tau; });
    EXPECT_EQ(mirror, 1);
  }
}

TEST(FindCriticalPoints, FrozenSeedHasTwoMinima) {
  const risk::PrEmpirical model(frozen_problem(10, 1));
  SearchConfig config;
  config.seeds = grid_seeds(2, -2.0, 2.0, 41);
  const auto result = find_critical_points(model, config);
  EXPECT_EQ(count_kind(result.records, Kind::LocalMin), 2u);
  EXPECT_EQ(count_kind(result.records, Kind::StrictSaddle), 3u);
}

TEST(FindCriticalPoints, DeterministicOutput) {
  const risk::PrEmpirical model(frozen_problem(10, 7));
  SearchConfig config;
  config.seeds = grid_seeds(2, -2.0, 2.0, 21);
  EXPECT_EQ(to_json(find_critical_points(model, config)).dump(), to_json(find_critical_points(model, config)).dump());
}

TEST(MatchCorrespondence, IdenticalLists) {
  const std::vector<Matrix> minima{Matrix(vec({1.0, -1.0})), Matrix(vec({-1.0, 1.0}))};
  const auto report = match_correspondence(minima, minima, 0.4, 0.2);
  ASSERT_EQ(report.pairs.size(), 2u);
  for (const auto& p : report.pairs) {
    EXPECT_EQ(p.population, p.empirical);
    EXPECT_EQ(p.distance, 0.0);
    EXPECT_TRUE(p.within_bound);
  }
  EXPECT_TRUE(report.unmatched_empirical.empty());
  EXPECT_TRUE(report.unmatched_population.empty());
  EXPECT_DOUBLE_EQ(report.heuristic_bound, 4.0);
}

TEST(MatchCorrespondence, SpuriousMinimaUnmatched) {
  const Vector xstar = vec({1.0, -1.0});
  const risk::PrEmpirical model(frozen_problem(10, 7));
  SearchConfig config;
  config.seeds = grid_seeds(2, -2.0, 2.0, 41);
  std::vector<Matrix> emp;
  for (const auto& r : find_critical_points(model, config).records) {
    if (r.kind == Kind::LocalMin) emp.push_back(r.location);
  }
  const std::vector<Matrix> pop{Matrix(xstar), Matrix(-xstar)};
  const auto th = landscape::phase_thresholds(xstar);
  const auto report = match_correspondence(pop, emp, th.epsilon, th.eta);
  ASSERT_EQ(emp.size(), 4u);
  EXPECT_EQ(report.pairs.size(), 2u);
  EXPECT_EQ(report.unmatched_empirical.size(), 2u);
  EXPECT_TRUE(report.unmatched_population.empty());
  for (const auto& p : report.pairs) EXPECT_LE(p.distance, 1e-8);
}

TEST(MatchCorrespondence, SignsAreDistinctPartners) {
  const std::vector<Matrix> pop{Matrix(vec({1.0, 0.0})), Matrix(vec({-1.0, 0.0}))};
  const std::vector<Matrix> emp{Matrix(vec({-0.9, 0.1}))};
  const auto report = match_correspondence(pop, emp, 1.0, 1.0);
  ASSERT_EQ(report.pairs.size(), 1u);
  EXPECT_EQ(report.pairs[0].population, 1u);
  EXPECT_EQ(report.unmatched_population, std::vector<std::size_t>{0});
}

TEST(LocalMinimize, SensingFromPerturbedMinimum) {
  RngStream rng(5);
  const SensingGroundTruth truth(rng.stiefel(6, 3), vec({1.0, 0.7, 0.05}), 2);
  const risk::MsPopulation model(truth);
  const Matrix start = truth.global_minimizer() * rng.orthogonal(2) + rng.gaussian_matrix(6, 2, 0.1);
  const auto result = local_minimize(model, start);
  EXPECT_TRUE(result.converged);
  EXPECT_LE(manifold::procrustes_distance(result.point, truth.global_minimizer()), 1e-7);
  EXPECT_GT(result.lambda_min, 0.0);
}

TEST(LocalMinimize, EmpiricalSensingStaysNear) {
  const auto truth = SensingGroundTruth::axis_aligned(8, vec({1.0, 1.0, 1.0}), 2);
  const auto ens = std::make_shared<const risk::SensingEnsemble>(risk::generate_sensing_ensemble(truth, 800, 9));
  const risk::MsEmpirical model(ens, truth);
  const auto result = local_minimize(model, truth.global_minimizer());
  EXPECT_TRUE(result.converged);
  EXPECT_LE(result.grad_norm, default_tolerances(model).crit);
  EXPECT_LT(distance_to_minimizer_set(truth, result.point), 0.2);
}

TEST(LocalMinimize, PhaseRetrievalFromOrigin) {
  const risk::PrPopulation model(vec({0.6, 0.8}));
  const auto result = local_minimize(model, Matrix(vec({0.3, 0.01})));
  EXPECT_TRUE(result.converged);
  EXPECT_NEAR(std::abs(result.point.col(0).dot(vec({0.6, 0.8}))), 1.0, 1e-8);
}

TEST(DistanceToMinimizerSet, SeparatedEqualsProcrustes) {
  RngStream rng(8);
  const auto truth = SensingGroundTruth::axis_aligned(6, vec({1.0, 0.5, 0.02}), 2);
  const Matrix u = rng.gaussian_matrix(6, 2);
  EXPECT_DOUBLE_EQ(distance_to_minimizer_set(truth, u), manifold::procrustes_distance(u, truth.global_minimizer()));
}

TEST(DistanceToMinimizerSet, TiedSpectrumMatchesSampledMinimum) {
  RngStream rng(12);
  const double lambda = 0.7;
  const auto truth = SensingGroundTruth::axis_aligned(5, vec({lambda, lambda, lambda}), 2);
  const Matrix wt = truth.eigvecs();
  for (int trial = 0; trial < 3; ++trial) {
    const Matrix u = rng.gaussian_matrix(5, 2);
    const double closed = distance_to_minimizer_set(truth, u);
    double best = std::numeric_limits<double>::infinity();
    for (int s = 0; s < 200000; ++s) {
      const Matrix v = std::sqrt(lambda) * wt * rng.stiefel(3, 2);
      best = std::min(best, (u - v).norm());
    }
    EXPECT_LE(closed, best + 1e-12);
    EXPECT_NEAR(closed, best, 2e-2);
    EXPECT_LE(closed, manifold::procrustes_distance(u, truth.global_minimizer()) + 1e-12);
  }
  EXPECT_NEAR(distance_to_minimizer_set(truth, std::sqrt(lambda) * wt.rightCols(2)), 0.0, 1e-7);
}

TEST(Json, RecordFields) {
  CriticalPointRecord record;
  record.location = Matrix(vec({1.0, 2.0}));
  record.basin_seed = Matrix(vec({0.5, 0.5}));
  record.kind = Kind::LocalMin;
  record.grad_norm = 1e-10;
  const auto j = to_json(record);
  EXPECT_EQ(j.at("kind"), "LocalMin");
  EXPECT_EQ(j.at("location").at("data").size(), 2u);
  CorrespondenceReport report;
  EXPECT_TRUE(to_json(report).contains("spurious_empirical"));
}

}  // namespace
}  // namespace landscape_lab::critical
