#include "landscape_lab/critical_points.hpp"

#include "landscape_lab/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace landscape_lab::critical {

namespace {

bool quotient_domain(const risk::RiskModel& model) { return model.factor_domain() && model.cols() > 1; }

/// Local linearization of the gradient map at p in orthonormal coordinates.
struct Chart {
  Matrix basis;  // (Nk) x d, empty for the identity chart
  Matrix jacobian;
  Vector coords;

  Matrix lift(const Vector& delta, Eigen::Index rows, Eigen::Index cols) const {
    const Vector v = basis.size() == 0 ? delta : Vector(basis * delta);
    return v.reshaped(rows, cols);
  }
};

Chart make_chart(const risk::RiskModel& model, const Matrix& p, const Matrix& grad) {
  Chart chart;
  const Vector g = grad.reshaped();
  if (quotient_domain(model)) {
    chart.basis = manifold::horizontal_basis_matrix(manifold::FactorPoint(p));
    chart.jacobian = spectral::restricted_hessian(model, p, chart.basis);
    chart.coords = chart.basis.transpose() * g;
  } else {
    chart.jacobian = spectral::dense_hessian(model, p);
    chart.coords = g;
  }
  return chart;
}

/// |grad| at p, or nullopt when p leaves the domain (rank-deficient factor).
std::optional<double> grad_norm_at(const risk::RiskModel& model, const Matrix& p) {
  try {
    const double n = risk::domain_grad(model, p).norm();
    return std::isfinite(n) ? std::optional<double>(n) : std::nullopt;
  } catch (const Error& e) {
    if (e.code() == ErrorCode::RankDeficient) return std::nullopt;
    throw;
  }
}

void cap_step(Matrix& step, double radius) {
  const double n = step.norm();
  if (n > radius) step *= radius / n;
}

Vector lm_solve(const Chart& chart, double mu) {
  const Matrix& j = chart.jacobian;
  Matrix normal = j.transpose() * j;
  normal.diagonal().array() += mu;
  return normal.ldlt().solve(-(j.transpose() * chart.coords));
}

bool lexicographic_less(const Matrix& a, const Matrix& b) {
  const Vector va = a.reshaped();
  const Vector vb = b.reshaped();
  return std::lexicographical_compare(va.begin(), va.end(), vb.begin(), vb.end());
}

nlohmann::json matrix_json(const Matrix& m) {
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", risk::row_major(m)}};
}

}  // namespace

std::string_view to_string(Kind kind) {
  switch (kind) {
    case Kind::LocalMin:
      return "LocalMin";
    case Kind::StrictSaddle:
      return "StrictSaddle";
    case Kind::Degenerate:
      return "Degenerate";
  }
  return "unknown";
}

Tolerances default_tolerances(const risk::RiskModel& model) {
  const risk::ProblemScale s = model.scale();
  return {1e-8 * (1.0 + s.gradient), 1e-6 * s.hessian, 1e-4 * s.domain};
}

Kind classify(double lambda_min, double tau_eig) {
  if (lambda_min >= tau_eig) return Kind::LocalMin;
  if (lambda_min <= -tau_eig) return Kind::StrictSaddle;
  return Kind::Degenerate;
}

std::vector<AnalyticPoint> analytic_critical_points_ms(const risk::SensingGroundTruth& truth) {
  const Eigen::Index r = truth.rank();
  const Eigen::Index k = truth.target_rank();
  std::vector<AnalyticPoint> out;
  std::vector<bool> mask(static_cast<std::size_t>(r), false);
  std::fill(mask.begin(), mask.begin() + k, true);
  do {
    std::vector<Eigen::Index> selection;
    std::string label = "eig{";
    for (Eigen::Index i = 0; i < r; ++i) {
      if (!mask[static_cast<std::size_t>(i)]) continue;
      if (!selection.empty()) label += ",";
      label += std::to_string(i + 1);
      selection.push_back(i);
    }
    label += "}";
    const bool top = selection.back() == k - 1;
    out.push_back({truth.factor_for(selection), top ? Kind::LocalMin : Kind::StrictSaddle, label});
  } while (std::prev_permutation(mask.begin(), mask.end()));
  return out;
}

std::vector<AnalyticPoint> analytic_critical_points_pr(const Vector& xstar) {
  const double n = xstar.norm();
  if (!(n > 0.0)) throw Error(ErrorCode::ZeroTruthSignal, "analytic_critical_points_pr: x* = 0");
  const Eigen::Index dim = xstar.size();
  std::vector<AnalyticPoint> out;
  out.push_back({Matrix::Zero(dim, 1), Kind::StrictSaddle, "origin"});
  out.push_back({Matrix(xstar), Kind::LocalMin, "+xstar"});
  out.push_back({Matrix(-xstar), Kind::LocalMin, "-xstar"});
  if (dim > 1) {
    const Eigen::HouseholderQR<Matrix> qr{Matrix(xstar)};
    const Matrix q = qr.householderQ();
    for (Eigen::Index i = 1; i < dim; ++i) {
      const Vector w = q.col(i) * (n / std::sqrt(3.0));
      out.push_back({Matrix(w), Kind::StrictSaddle, "+circle" + std::to_string(i)});
      out.push_back({Matrix(-w), Kind::StrictSaddle, "-circle" + std::to_string(i)});
    }
  }
  return out;
}

std::vector<AnalyticPoint> analytic_critical_points_rank1_sensing(const Vector& xstar) {
  if (!(xstar.norm() > 0.0)) throw Error(ErrorCode::ZeroTruthSignal, "rank-one sensing: x* = 0");
  return {{Matrix::Zero(xstar.size(), 1), Kind::StrictSaddle, "origin"},
          {Matrix(xstar), Kind::LocalMin, "+xstar"},
          {Matrix(-xstar), Kind::LocalMin, "-xstar"}};
}

std::vector<Matrix> grid_seeds(Eigen::Index dim, double lo, double hi, std::size_t points) {
  if (points < 2 || dim < 1 || !(hi > lo)) throw Error(ErrorCode::InvalidConfig, "grid_seeds: need points >= 2, hi > lo");
  std::size_t total = 1;
  for (Eigen::Index d = 0; d < dim; ++d) total *= points;
  std::vector<Matrix> seeds;
  seeds.reserve(total);
  const double step = (hi - lo) / static_cast<double>(points - 1);
  for (std::size_t idx = 0; idx < total; ++idx) {
    Matrix p(dim, 1);
    std::size_t rest = idx;
    for (Eigen::Index d = 0; d < dim; ++d) {
      p(d, 0) = lo + step * static_cast<double>(rest % points);
      rest /= points;
    }
    seeds.push_back(p);
  }
  return seeds;
}

double domain_distance(const risk::RiskModel& model, const Matrix& a, const Matrix& b) {
  return quotient_domain(model) ? manifold::procrustes_distance(a, b) : (a - b).norm();
}

SearchResult find_critical_points(const risk::RiskModel& model, const SearchConfig& config) {
  const Tolerances tol = config.tolerances.value_or(default_tolerances(model));
  const risk::ProblemScale scale = model.scale();
  const double radius = config.trust_radius * scale.domain;
  const double mu_floor = 1e-16 * scale.hessian * scale.hessian;
  const double mu_ceiling = 1e16 * scale.hessian * scale.hessian;

  SearchResult result;
  std::vector<CriticalPointRecord> converged;
  for (std::size_t s = 0; s < config.seeds.size(); ++s) {
    const Matrix& seed = config.seeds[s];
    if (seed.rows() != model.rows() || seed.cols() != model.cols()) {
      throw Error(ErrorCode::DimensionMismatch, "find_critical_points: seed shape");
    }
    Matrix p = seed;
    std::optional<double> gn = grad_norm_at(model, p);
    if (!gn) {
      result.failures.push_back({s, "seed outside the domain"});
      continue;
    }
    double mu = 1e-3 * scale.hessian * scale.hessian;
    std::size_t iter = 0;
    std::string failure;
    std::size_t polish = 0;
    while (true) {
      if (*gn <= tol.crit && (polish >= config.polish_steps)) break;
      if (iter >= config.max_iter + config.polish_steps) {
        if (*gn > tol.crit) failure = "iteration limit";
        break;
      }
      ++iter;
      const Chart chart = make_chart(model, p, risk::domain_grad(model, p));
      bool moved = false;
      const bool polishing = *gn <= tol.crit;
      if (polishing) {
        // Undamped least-squares Newton step.
        Matrix step = chart.lift(chart.jacobian.completeOrthogonalDecomposition().solve(-chart.coords), p.rows(),
                                 p.cols());
        cap_step(step, radius);
        const std::optional<double> gn_new = grad_norm_at(model, p + step);
        if (gn_new && *gn_new < *gn) {
          p += step;
          gn = gn_new;
          moved = true;
        }
      }
      double trial_mu = mu;
      while (!polishing && trial_mu <= mu_ceiling) {
        Matrix step = chart.lift(lm_solve(chart, trial_mu), p.rows(), p.cols());
        cap_step(step, radius);
        const Matrix candidate = p + step;
        const std::optional<double> gn_new = grad_norm_at(model, candidate);
        if (gn_new && *gn_new < *gn) {
          p = candidate;
          gn = gn_new;
          mu = std::max(trial_mu / 5.0, mu_floor);
          moved = true;
          break;
        }
        trial_mu = std::max(trial_mu, mu_floor) * 4.0;
      }
      if (polishing) {
        ++polish;
        if (!moved) polish = config.polish_steps;
        continue;
      }
      if (!moved) {
        failure = "damping exhausted at |grad| = " + std::to_string(*gn);
        break;
      }
      if (p.norm() > 1e3 * scale.domain) {
        failure = "diverged";
        break;
      }
    }
    if (!failure.empty()) {
      result.failures.push_back({s, failure});
      continue;
    }
    CriticalPointRecord rec;
    rec.location = p;
    rec.grad_norm = *gn;
    rec.lambda_min = spectral::min_eig_domain(model, p).lambda_min;
    rec.kind = classify(rec.lambda_min, tol.eig);
    rec.basin_seed = seed;
    rec.seed_index = s;
    rec.iterations = iter;
    converged.push_back(std::move(rec));
  }
  result.converged_before_dedupe = converged.size();

  std::stable_sort(converged.begin(), converged.end(), [](const CriticalPointRecord& a, const CriticalPointRecord& b) {
    if (a.grad_norm != b.grad_norm) return a.grad_norm < b.grad_norm;
    return lexicographic_less(a.location, b.location);
  });
  for (CriticalPointRecord& rec : converged) {
    const bool duplicate = std::any_of(result.records.begin(), result.records.end(), [&](const CriticalPointRecord& kept) {
      return domain_distance(model, kept.location, rec.location) <= tol.dedupe;
    });
    if (!duplicate) result.records.push_back(std::move(rec));
  }
  std::sort(result.records.begin(), result.records.end(),
            [](const CriticalPointRecord& a, const CriticalPointRecord& b) {
              return lexicographic_less(a.location, b.location);
            });
  return result;
}

MinimizeResult local_minimize(const risk::RiskModel& model, const Matrix& start, const MinimizeConfig& config) {
  const Tolerances tol = config.tolerances.value_or(default_tolerances(model));
  const risk::ProblemScale scale = model.scale();
  const double radius = config.trust_radius * scale.domain;
  const double shift_floor = 1e-3 * scale.hessian;

  MinimizeResult out;
  Matrix p = start;
  for (out.iterations = 0; out.iterations <= config.max_iter; ++out.iterations) {
    const Matrix grad = risk::domain_grad(model, p);
    out.grad_norm = grad.norm();
    if (!std::isfinite(out.grad_norm)) throw Error(ErrorCode::NonFiniteEntry, "local_minimize: gradient");
    if (out.grad_norm <= tol.crit) {
      out.lambda_min = spectral::min_eig_domain(model, p).lambda_min;
      out.converged = out.lambda_min >= tol.eig;
      break;
    }
    if (out.iterations == config.max_iter) break;

    const Chart chart = make_chart(model, p, grad);
    Eigen::SelfAdjointEigenSolver<Matrix> eig(chart.jacobian);
    const double shift = std::max(0.0, shift_floor - eig.eigenvalues()(0));
    Matrix shifted = chart.jacobian;
    shifted.diagonal().array() += shift;
    const Vector delta = shifted.ldlt().solve(-chart.coords);
    Matrix step = chart.lift(delta, p.rows(), p.cols());
    cap_step(step, radius);

    const double f0 = model.value(p);
    const double slope = inner(grad, step);
    double t = 1.0;
    bool accepted = false;
    for (int back = 0; back < 40; ++back, t *= 0.5) {
      const Matrix candidate = p + t * step;
      const std::optional<double> gn_new = grad_norm_at(model, candidate);
      if (!gn_new) continue;
      const double f1 = model.value(candidate);
      // Armijo, or an unshifted full step that lowers |grad|.
      if (f1 <= f0 + 1e-4 * t * slope || (shift == 0.0 && back == 0 && *gn_new < out.grad_norm)) {
        p = candidate;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
  }
  out.point = p;
  out.value = model.value(p);
  if (!out.converged) out.lambda_min = spectral::min_eig_domain(model, p).lambda_min;
  return out;
}

double distance_to_minimizer_set(const risk::SensingGroundTruth& truth, const Matrix& u) {
  const Eigen::Index k = truth.target_rank();
  const Vector& lam = truth.eigvals();
  const double lk = lam(k - 1);
  auto tied = [lk](double v) { return std::abs(v - lk) <= 1e-12 * lk; };
  const bool crossing = truth.rank() > k && tied(lam(k));
  if (!crossing || !tied(lam(0))) return manifold::procrustes_distance(u, truth.global_minimizer());
  Eigen::Index t = k;
  while (t < truth.rank() && tied(lam(t))) ++t;
  const Matrix proj = truth.eigvecs().leftCols(t).transpose() * u;
  const double nuclear = Eigen::JacobiSVD<Matrix>(proj).singularValues().sum();
  const double d2 = u.squaredNorm() + static_cast<double>(k) * lk - 2.0 * std::sqrt(lk) * nuclear;
  return std::sqrt(std::max(d2, 0.0));
}

CorrespondenceReport match_correspondence(const std::vector<Matrix>& pop_minima,
                                          const std::vector<Matrix>& emp_minima, double epsilon, double eta,
                                          bool quotient) {
  CorrespondenceReport report;
  report.population_minima = pop_minima;
  report.empirical_minima = emp_minima;
  report.epsilon = epsilon;
  report.eta = eta;
  report.heuristic_bound = eta > 0.0 ? 2.0 * epsilon / eta : std::numeric_limits<double>::infinity();

  struct Candidate {
    double distance;
    std::size_t pop;
    std::size_t emp;
  };
  std::vector<Candidate> all;
  for (std::size_t i = 0; i < pop_minima.size(); ++i) {
    for (std::size_t j = 0; j < emp_minima.size(); ++j) {
      require_same_shape(pop_minima[i], emp_minima[j], "match_correspondence");
      const double d = quotient ? manifold::procrustes_distance(emp_minima[j], pop_minima[i])
                                : (emp_minima[j] - pop_minima[i]).norm();
      all.push_back({d, i, j});
    }
  }
  std::stable_sort(all.begin(), all.end(), [](const Candidate& a, const Candidate& b) { return a.distance < b.distance; });
  std::vector<bool> pop_used(pop_minima.size(), false);
  std::vector<bool> emp_used(emp_minima.size(), false);
  for (const Candidate& c : all) {
    if (pop_used[c.pop] || emp_used[c.emp]) continue;
    pop_used[c.pop] = emp_used[c.emp] = true;
    report.pairs.push_back({c.pop, c.emp, c.distance, c.distance <= report.heuristic_bound});
  }
  std::sort(report.pairs.begin(), report.pairs.end(),
            [](const MatchedPair& a, const MatchedPair& b) { return a.population < b.population; });
  for (std::size_t i = 0; i < pop_used.size(); ++i) {
    if (!pop_used[i]) report.unmatched_population.push_back(i);
  }
  for (std::size_t j = 0; j < emp_used.size(); ++j) {
    if (!emp_used[j]) report.unmatched_empirical.push_back(j);
  }
  return report;
}

nlohmann::json to_json(const CriticalPointRecord& record) {
  return {{"location", matrix_json(record.location)},
          {"grad_norm", record.grad_norm},
          {"lambda_min", record.lambda_min},
          {"kind", std::string(to_string(record.kind))},
          {"basin_seed", matrix_json(record.basin_seed)},
          {"seed_index", record.seed_index},
          {"iterations", record.iterations}};
}

nlohmann::json to_json(const SearchResult& result) {
  nlohmann::json records = nlohmann::json::array();
  for (const auto& r : result.records) records.push_back(to_json(r));
  nlohmann::json failures = nlohmann::json::array();
  for (const auto& f : result.failures) failures.push_back({{"seed_index", f.seed_index}, {"reason", f.reason}});
  return {{"records", records}, {"failures", failures}, {"converged_before_dedupe", result.converged_before_dedupe}};
}

nlohmann::json to_json(const CorrespondenceReport& report) {
  nlohmann::json pop = nlohmann::json::array();
  for (const auto& m : report.population_minima) pop.push_back(matrix_json(m));
  nlohmann::json emp = nlohmann::json::array();
  for (const auto& m : report.empirical_minima) emp.push_back(matrix_json(m));
  nlohmann::json pairs = nlohmann::json::array();
  for (const auto& p : report.pairs) {
    pairs.push_back({{"population", p.population},
                     {"empirical", p.empirical},
                     {"distance", p.distance},
                     {"within_bound", p.within_bound}});
  }
  return {{"population_minima", pop},
          {"empirical_minima", emp},
          {"pairs", pairs},
          {"unmatched_population", report.unmatched_population},
          {"spurious_empirical", report.unmatched_empirical},
          {"epsilon", report.epsilon},
          {"eta", report.eta},
          {"heuristic_bound", report.heuristic_bound}};
}

}  // namespace landscape_lab::critical
