#include "landscape_lab/risk_models.hpp"

#include "landscape_lab/rng.hpp"

#include <algorithm>
#include <cmath>

namespace landscape_lab::risk {

using nlohmann::json;

// ---------------------------------------------------------------------------
// SensingGroundTruth

SensingGroundTruth::SensingGroundTruth(Matrix eigvecs, Vector eigvals, Eigen::Index target_rank)
    : eigvecs_(std::move(eigvecs)), eigvals_(std::move(eigvals)), target_rank_(target_rank) {
  const Eigen::Index r = eigvals_.size();
  if (r < 1 || eigvecs_.cols() != r || eigvecs_.rows() < r) {
    throw Error(ErrorCode::InvalidTruth, "eigvecs must be N x r with r = len(eigvals) <= N");
  }
  if (target_rank_ < (r + 1) / 2 || target_rank_ > r) {
    throw Error(ErrorCode::InvalidTruth, "target rank must satisfy ceil(r/2) <= k <= r");
  }
  for (Eigen::Index i = 0; i < r; ++i) {
    if (!(eigvals_(i) > 0.0)) throw Error(ErrorCode::InvalidTruth, "eigenvalues must be positive");
    if (i > 0 && eigvals_(i) > eigvals_(i - 1)) {
      throw Error(ErrorCode::InvalidTruth, "eigenvalues must be sorted descending");
    }
  }
  const double orth = (eigvecs_.transpose() * eigvecs_ - Matrix::Identity(r, r)).norm();
  if (orth > 1e-10) throw Error(ErrorCode::InvalidTruth, "eigenvectors are not orthonormal");
  target_ = eigvecs_ * eigvals_.asDiagonal() * eigvecs_.transpose();
  target_ = 0.5 * (target_ + target_.transpose());
}

SensingGroundTruth SensingGroundTruth::axis_aligned(Eigen::Index n, const Vector& eigvals, Eigen::Index target_rank) {
  return SensingGroundTruth(Matrix::Identity(n, eigvals.size()), eigvals, target_rank);
}

SensingGroundTruth SensingGroundTruth::rank_one(const Vector& xstar) {
  const double norm = xstar.norm();
  if (norm == 0.0) throw Error(ErrorCode::ZeroTruthSignal, "x* = 0");
  Matrix w = xstar / norm;
  Vector lam(1);
  lam(0) = norm * norm;
  return SensingGroundTruth(std::move(w), std::move(lam), 1);
}

double SensingGroundTruth::kappa() const { return std::sqrt(eigvals_(0) / lambda_k()); }

bool SensingGroundTruth::well_separated() const {
  if (rank() == target_rank_) return true;
  return eigvals_(target_rank_) <= lambda_k() / 12.0;
}

bool SensingGroundTruth::repeated_top_eigenvalues() const {
  const Eigen::Index last = std::min(rank() - 1, target_rank_);
  for (Eigen::Index i = 1; i <= last; ++i) {
    if (eigvals_(i - 1) - eigvals_(i) <= 1e-12 * eigvals_(0)) return true;
  }
  return false;
}

Matrix SensingGroundTruth::factor_for(const std::vector<Eigen::Index>& selection) const {
  Matrix u(dim(), static_cast<Eigen::Index>(selection.size()));
  for (std::size_t c = 0; c < selection.size(); ++c) {
    const Eigen::Index i = selection[c];
    if (i < 0 || i >= rank()) throw Error(ErrorCode::DimensionMismatch, "eigenvalue index out of range");
    u.col(static_cast<Eigen::Index>(c)) = eigvecs_.col(i) * std::sqrt(eigvals_(i));
  }
  return u;
}

Matrix SensingGroundTruth::global_minimizer() const {
  std::vector<Eigen::Index> top(static_cast<std::size_t>(target_rank_));
  for (Eigen::Index i = 0; i < target_rank_; ++i) top[static_cast<std::size_t>(i)] = i;
  return factor_for(top);
}

// ---------------------------------------------------------------------------
// Ensembles

SensingEnsemble::SensingEnsemble(std::vector<Matrix> raw, const Matrix& target, std::uint64_t seed)
    : raw_(std::move(raw)), seed_(seed) {
  if (raw_.empty()) throw Error(ErrorCode::InvalidSampleCount, "ensemble needs M >= 1");
  dim_ = raw_.front().rows();
  if (target.rows() != dim_ || target.cols() != dim_) {
    throw Error(ErrorCode::DimensionMismatch, "target and measurement matrices differ in size");
  }
  const auto m = static_cast<Eigen::Index>(raw_.size());
  sym_.reserve(raw_.size());
  packed_.resize(m, dim_ * dim_);
  y_.resize(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const Matrix& b = raw_[static_cast<std::size_t>(i)];
    if (b.rows() != dim_ || b.cols() != dim_) {
      throw Error(ErrorCode::DimensionMismatch, "measurement matrices must all be N x N");
    }
    Matrix a = 0.5 * (b + b.transpose());
    packed_.row(i) = Eigen::Map<const Vector>(a.data(), a.size()).transpose();
    y_(i) = inner(target, a);
    sym_.push_back(std::move(a));
  }
}

Vector SensingEnsemble::apply(const Matrix& z) const {
  if (z.rows() != dim_ || z.cols() != dim_) throw Error(ErrorCode::DimensionMismatch, "A(Z) needs N x N input");
  return packed_ * Eigen::Map<const Vector>(z.data(), z.size());
}

Matrix SensingEnsemble::adjoint(const Vector& v) const {
  if (v.size() != size()) throw Error(ErrorCode::DimensionMismatch, "A*(v) needs length-M input");
  Vector flat = packed_.transpose() * v;
  return Eigen::Map<const Matrix>(flat.data(), dim_, dim_);
}

PhaseProblem::PhaseProblem(Vector truth, Matrix vectors, std::uint64_t seed)
    : truth_(std::move(truth)), vectors_(std::move(vectors)), seed_(seed) {
  if (vectors_.rows() < 1) throw Error(ErrorCode::InvalidSampleCount, "problem needs M >= 1");
  if (vectors_.cols() != truth_.size()) throw Error(ErrorCode::DimensionMismatch, "a_m and x* differ in length");
  y_ = (vectors_ * truth_).array().square();
}

SensingEnsemble generate_sensing_ensemble(const SensingGroundTruth& truth, Eigen::Index m, std::uint64_t seed) {
  if (m < 1) throw Error(ErrorCode::InvalidSampleCount, "M = " + std::to_string(m));
  RngStream rng(seed, "sensing_ensemble", 0);
  const double stddev = 1.0 / std::sqrt(static_cast<double>(m));
  std::vector<Matrix> raw;
  raw.reserve(static_cast<std::size_t>(m));
  for (Eigen::Index i = 0; i < m; ++i) raw.push_back(rng.gaussian_matrix(truth.dim(), truth.dim(), stddev));
  return SensingEnsemble(std::move(raw), truth.target(), seed);
}

PhaseProblem generate_phase_problem(const Vector& xstar, Eigen::Index m, std::uint64_t seed) {
  if (m < 1) throw Error(ErrorCode::InvalidSampleCount, "M = " + std::to_string(m));
  RngStream rng(seed, "phase_problem", 0);
  return PhaseProblem(xstar, rng.gaussian_matrix(m, xstar.size()), seed);
}

// ---------------------------------------------------------------------------
// RiskModel

void RiskModel::check_point(const Matrix& p, const char* ctx) const {
  if (p.rows() != rows() || p.cols() != cols()) {
    throw Error(ErrorCode::DimensionMismatch, std::string(ctx) + ": expected " + std::to_string(rows()) + "x" +
                                                  std::to_string(cols()) + ", got " + std::to_string(p.rows()) +
                                                  "x" + std::to_string(p.cols()));
  }
}

Evaluation RiskModel::evaluate(const Matrix& p, const std::optional<Matrix>& d) const {
  Evaluation out;
  out.value = value(p);
  out.gradient = euclidean_grad(p);
  if (d) out.hess_form = hess_quadratic(p, *d);
  return out;
}

namespace {

ProblemScale sensing_scale(const SensingGroundTruth& truth) {
  const double lk = truth.lambda_k();
  return {std::sqrt(lk), std::pow(lk, 1.5), lk, lk * lk};
}

ProblemScale phase_scale(const Vector& xstar) {
  const double n = xstar.norm();
  return {n, n * n * n, n * n, n * n * n * n};
}

}  // namespace

ProblemScale MsPopulation::scale() const { return sensing_scale(truth_); }

double MsPopulation::value(const Matrix& u) const {
  check_point(u, "ms_population");
  return 0.25 * (u * u.transpose() - truth_.target()).squaredNorm();
}

Matrix MsPopulation::euclidean_grad(const Matrix& u) const {
  check_point(u, "ms_population");
  return (u * u.transpose() - truth_.target()) * u;
}

Matrix MsPopulation::hess_vec(const Matrix& u, const Matrix& d) const {
  check_point(u, "ms_population");
  require_same_shape(u, d, "ms_population hess_vec");
  const Matrix s = u * d.transpose() + d * u.transpose();
  return s * u + (u * u.transpose() - truth_.target()) * d;
}

double MsPopulation::hess_quadratic(const Matrix& u, const Matrix& d) const {
  check_point(u, "ms_population");
  require_same_shape(u, d, "ms_population hess_quadratic");
  const Matrix s = u * d.transpose() + d * u.transpose();
  return 0.5 * s.squaredNorm() + inner(u * u.transpose() - truth_.target(), d * d.transpose());
}

MsEmpirical::MsEmpirical(std::shared_ptr<const SensingEnsemble> ensemble, SensingGroundTruth truth)
    : ensemble_(std::move(ensemble)), truth_(std::move(truth)) {
  if (!ensemble_ || ensemble_->dim() != truth_.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "ensemble and truth differ in N");
  }
}

ProblemScale MsEmpirical::scale() const { return sensing_scale(truth_); }

double MsEmpirical::value(const Matrix& u) const {
  check_point(u, "ms_empirical");
  return 0.25 * ensemble_->apply(u * u.transpose() - truth_.target()).squaredNorm();
}

Matrix MsEmpirical::euclidean_grad(const Matrix& u) const {
  check_point(u, "ms_empirical");
  return ensemble_->normal(u * u.transpose() - truth_.target()) * u;
}

Matrix MsEmpirical::hess_vec(const Matrix& u, const Matrix& d) const {
  check_point(u, "ms_empirical");
  require_same_shape(u, d, "ms_empirical hess_vec");
  const Matrix s = u * d.transpose() + d * u.transpose();
  return ensemble_->normal(s) * u + ensemble_->normal(u * u.transpose() - truth_.target()) * d;
}

double MsEmpirical::hess_quadratic(const Matrix& u, const Matrix& d) const {
  check_point(u, "ms_empirical");
  require_same_shape(u, d, "ms_empirical hess_quadratic");
  const Matrix s = u * d.transpose() + d * u.transpose();
  // <A*A(R), D D^T> = <A(R), A(D D^T)>
  return 0.5 * ensemble_->apply(s).squaredNorm() +
         ensemble_->apply(u * u.transpose() - truth_.target()).dot(ensemble_->apply(d * d.transpose()));
}

PrPopulation::PrPopulation(Vector xstar) : xstar_(std::move(xstar)) {
  if (xstar_.size() < 1) throw Error(ErrorCode::DimensionMismatch, "x* must be non-empty");
}

ProblemScale PrPopulation::scale() const { return phase_scale(xstar_); }

double PrPopulation::value(const Matrix& x) const {
  check_point(x, "pr_population");
  const Vector v = x.col(0);
  const double diff = v.squaredNorm() - xstar_.squaredNorm();
  return (v * v.transpose() - xstar_ * xstar_.transpose()).squaredNorm() + 0.5 * diff * diff;
}

Matrix PrPopulation::euclidean_grad(const Matrix& x) const {
  check_point(x, "pr_population");
  const Vector v = x.col(0);
  return 6.0 * v.squaredNorm() * v - 2.0 * xstar_.squaredNorm() * v - 4.0 * xstar_.dot(v) * xstar_;
}

Matrix PrPopulation::hessian(const Vector& x) const {
  const auto n = xstar_.size();
  return 12.0 * x * x.transpose() - 4.0 * xstar_ * xstar_.transpose() +
         (6.0 * x.squaredNorm() - 2.0 * xstar_.squaredNorm()) * Matrix::Identity(n, n);
}

Matrix PrPopulation::hess_vec(const Matrix& x, const Matrix& d) const {
  check_point(x, "pr_population");
  require_same_shape(x, d, "pr_population hess_vec");
  const Vector v = x.col(0);
  const Vector w = d.col(0);
  return 12.0 * v.dot(w) * v - 4.0 * xstar_.dot(w) * xstar_ +
         (6.0 * v.squaredNorm() - 2.0 * xstar_.squaredNorm()) * w;
}

double PrPopulation::hess_quadratic(const Matrix& x, const Matrix& d) const {
  check_point(x, "pr_population");
  require_same_shape(x, d, "pr_population hess_quadratic");
  const Vector v = x.col(0);
  const Vector w = d.col(0);
  const double vw = v.dot(w);
  const double sw = xstar_.dot(w);
  return 12.0 * vw * vw - 4.0 * sw * sw + (6.0 * v.squaredNorm() - 2.0 * xstar_.squaredNorm()) * w.squaredNorm();
}

PrEmpirical::PrEmpirical(std::shared_ptr<const PhaseProblem> problem) : problem_(std::move(problem)) {
  if (!problem_) throw Error(ErrorCode::InvalidConfig, "null phase problem");
}

ProblemScale PrEmpirical::scale() const { return phase_scale(problem_->truth()); }

double PrEmpirical::value(const Matrix& x) const {
  check_point(x, "pr_empirical");
  const Vector s = problem_->vectors() * x.col(0);
  const Vector r = s.array().square().matrix() - problem_->measurements();
  return r.squaredNorm() / (2.0 * static_cast<double>(problem_->size()));
}

Matrix PrEmpirical::euclidean_grad(const Matrix& x) const {
  check_point(x, "pr_empirical");
  const Vector s = problem_->vectors() * x.col(0);
  const Vector weights = s.array().cube() - s.array() * problem_->measurements().array();
  return (2.0 / static_cast<double>(problem_->size())) * problem_->vectors().transpose() * weights;
}

Matrix PrEmpirical::hessian(const Vector& x) const {
  const Vector s = problem_->vectors() * x;
  const Vector weights = 3.0 * s.array().square() - problem_->measurements().array();
  const Matrix& a = problem_->vectors();
  return (2.0 / static_cast<double>(problem_->size())) * a.transpose() * weights.asDiagonal() * a;
}

Matrix PrEmpirical::hess_vec(const Matrix& x, const Matrix& d) const {
  check_point(x, "pr_empirical");
  require_same_shape(x, d, "pr_empirical hess_vec");
  const Vector s = problem_->vectors() * x.col(0);
  const Vector t = problem_->vectors() * d.col(0);
  const Vector weights = (3.0 * s.array().square() - problem_->measurements().array()) * t.array();
  return (2.0 / static_cast<double>(problem_->size())) * problem_->vectors().transpose() * weights;
}

double PrEmpirical::hess_quadratic(const Matrix& x, const Matrix& d) const {
  check_point(x, "pr_empirical");
  require_same_shape(x, d, "pr_empirical hess_quadratic");
  const Vector s = problem_->vectors() * x.col(0);
  const Vector t = problem_->vectors() * d.col(0);
  const double sum = ((3.0 * s.array().square() - problem_->measurements().array()) * t.array().square()).sum();
  return 2.0 * sum / static_cast<double>(problem_->size());
}

manifold::HorizontalTangent riemannian_grad(const RiskModel& model, const manifold::FactorPoint& u) {
  return manifold::horizontal_project(u, model.euclidean_grad(u.entries()));
}

Matrix domain_grad(const RiskModel& model, const Matrix& p) {
  if (!model.factor_domain() || p.cols() == 1) return model.euclidean_grad(p);
  return riemannian_grad(model, manifold::FactorPoint(p)).entries();
}

// ---------------------------------------------------------------------------
// JSON

std::vector<double> row_major(const Matrix& m) {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(m.size()));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) out.push_back(m(i, j));
  return out;
}

Matrix from_row_major(const std::vector<double>& data, Eigen::Index rows, Eigen::Index cols) {
  if (static_cast<Eigen::Index>(data.size()) != rows * cols) {
    throw Error(ErrorCode::DimensionMismatch, "row-major array has wrong length");
  }
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = data[static_cast<std::size_t>(i * cols + j)];
  return m;
}

namespace {

std::vector<double> to_std(const Vector& v) { return {v.data(), v.data() + v.size()}; }

Vector to_eigen(const std::vector<double>& v) {
  return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace

json to_json(const SensingGroundTruth& truth) {
  return {{"N", truth.dim()},
          {"r", truth.rank()},
          {"k", truth.target_rank()},
          {"eigvals", to_std(truth.eigvals())},
          {"eigvecs", row_major(truth.eigvecs())}};
}

SensingGroundTruth truth_from_json(const json& j) {
  const auto n = j.at("N").get<Eigen::Index>();
  const auto r = j.at("r").get<Eigen::Index>();
  return SensingGroundTruth(from_row_major(j.at("eigvecs").get<std::vector<double>>(), n, r),
                            to_eigen(j.at("eigvals").get<std::vector<double>>()), j.at("k").get<Eigen::Index>());
}

json to_json(const SensingEnsemble& ensemble, const SensingGroundTruth& truth) {
  json raw = json::array();
  for (const auto& b : ensemble.raw()) raw.push_back(row_major(b));
  return {{"kind", "sensing"},
          {"seed", ensemble.seed()},
          {"dims", {{"N", ensemble.dim()}}},
          {"M", ensemble.size()},
          {"truth", to_json(truth)},
          {"raw", std::move(raw)},
          {"y", to_std(ensemble.measurements())}};
}

SensingEnsemble sensing_ensemble_from_json(const json& j) {
  if (j.at("kind") != "sensing") throw Error(ErrorCode::InvalidConfig, "not a sensing ensemble");
  const auto n = j.at("dims").at("N").get<Eigen::Index>();
  const SensingGroundTruth truth = truth_from_json(j.at("truth"));
  std::vector<Matrix> raw;
  for (const auto& b : j.at("raw")) raw.push_back(from_row_major(b.get<std::vector<double>>(), n, n));
  if (static_cast<Eigen::Index>(raw.size()) != j.at("M").get<Eigen::Index>()) {
    throw Error(ErrorCode::InvalidSampleCount, "M does not match the number of matrices");
  }
  return SensingEnsemble(std::move(raw), truth.target(), j.at("seed").get<std::uint64_t>());
}

json to_json(const PhaseProblem& problem) {
  return {{"kind", "phase"},
          {"seed", problem.seed()},
          {"dims", {{"N", problem.dim()}}},
          {"M", problem.size()},
          {"truth", to_std(problem.truth())},
          {"vectors", row_major(problem.vectors())},
          {"y", to_std(problem.measurements())}};
}

PhaseProblem phase_problem_from_json(const json& j) {
  if (j.at("kind") != "phase") throw Error(ErrorCode::InvalidConfig, "not a phase problem");
  const auto n = j.at("dims").at("N").get<Eigen::Index>();
  const auto m = j.at("M").get<Eigen::Index>();
  return PhaseProblem(to_eigen(j.at("truth").get<std::vector<double>>()),
                      from_row_major(j.at("vectors").get<std::vector<double>>(), m, n),
                      j.at("seed").get<std::uint64_t>());
}

}  // namespace landscape_lab::risk
