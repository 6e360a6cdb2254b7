#pragma once

// Population and empirical risks for low-rank matrix sensing and real phase
// retrieval.
//
// Matrix sensing, factor U (N x k), target X = W Lambda W^T of rank r:
//   g(U) = 1/4 |U U^T - X|_F^2                 grad = (U U^T - X) U
//   f(U) = 1/4 |A(U U^T - X)|^2                grad = A*A(U U^T - X) U
//   hess_vec(U, D) = L(U D^T + D U^T) U + L(U U^T - X) D,  L = I or A*A
//
// Phase retrieval, x in R^N:
//   g(x) = |x x^T - x* x*^T|_F^2 + 1/2 (|x|^2 - |x*|^2)^2
//   f(x) = 1/(2M) sum_m (<a_m, x>^2 - y_m)^2,  y_m = <a_m, x*>^2
//
// Points are passed as N x k matrices; phase-retrieval points are N x 1.

#include "landscape_lab/common.hpp"
#include "landscape_lab/manifold.hpp"

#include <json.hpp>

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace landscape_lab::risk {

class SensingGroundTruth {
 public:
  /// eigvecs: N x r orthonormal; eigvals: r positive values sorted descending;
  /// target_rank k with ceil(r/2) <= k <= r. Throws InvalidTruth otherwise.
  SensingGroundTruth(Matrix eigvecs, Vector eigvals, Eigen::Index target_rank);

  /// W = first r columns of the N x N identity.
  static SensingGroundTruth axis_aligned(Eigen::Index n, const Vector& eigvals, Eigen::Index target_rank);
  /// Rank-1 target x* x*^T fitted with k = 1.
  static SensingGroundTruth rank_one(const Vector& xstar);

  const Matrix& eigvecs() const noexcept { return eigvecs_; }
  const Vector& eigvals() const noexcept { return eigvals_; }
  const Matrix& target() const noexcept { return target_; }
  Eigen::Index dim() const noexcept { return eigvecs_.rows(); }
  Eigen::Index rank() const noexcept { return eigvecs_.cols(); }
  Eigen::Index target_rank() const noexcept { return target_rank_; }

  double lambda_k() const { return eigvals_(target_rank_ - 1); }
  /// sqrt(lambda_1 / lambda_k).
  double kappa() const;
  /// lambda_{k+1} <= lambda_k / 12 (vacuous when r = k).
  bool well_separated() const;
  /// Some of lambda_1..lambda_k coincide (to 1e-12 relative), or lambda_k = lambda_{k+1}.
  bool repeated_top_eigenvalues() const;

  /// W_sel Lambda_sel^{1/2} for the given eigenvalue indices (0-based).
  Matrix factor_for(const std::vector<Eigen::Index>& selection) const;
  /// Canonical global minimizer U* = W_k Lambda_k^{1/2}.
  Matrix global_minimizer() const;

 private:
  Matrix eigvecs_;
  Vector eigvals_;
  Eigen::Index target_rank_;
  Matrix target_;
};

/// M symmetric Gaussian measurement matrices A_m = (B_m + B_m^T) / 2 with
/// B_m entries i.i.d. N(0, 1/M), and measurements y_m = <X, A_m>.
class SensingEnsemble {
 public:
  SensingEnsemble(std::vector<Matrix> raw, const Matrix& target, std::uint64_t seed);

  Eigen::Index size() const noexcept { return static_cast<Eigen::Index>(raw_.size()); }
  Eigen::Index dim() const noexcept { return dim_; }
  std::uint64_t seed() const noexcept { return seed_; }
  const std::vector<Matrix>& raw() const noexcept { return raw_; }
  const std::vector<Matrix>& sym() const noexcept { return sym_; }
  const Vector& measurements() const noexcept { return y_; }

  /// A(Z)_m = <A_m, Z>.
  Vector apply(const Matrix& z) const;
  /// A*(v) = sum_m v_m A_m.
  Matrix adjoint(const Vector& v) const;
  Matrix normal(const Matrix& z) const { return adjoint(apply(z)); }

 private:
  std::vector<Matrix> raw_;
  std::vector<Matrix> sym_;
  Matrix packed_;  // M x N^2, row m = vec(A_m)
  Vector y_;
  Eigen::Index dim_ = 0;
  std::uint64_t seed_ = 0;
};

class PhaseProblem {
 public:
  /// vectors: M x N, row m is a_m.
  PhaseProblem(Vector truth, Matrix vectors, std::uint64_t seed);

  const Vector& truth() const noexcept { return truth_; }
  const Matrix& vectors() const noexcept { return vectors_; }
  const Vector& measurements() const noexcept { return y_; }
  Eigen::Index size() const noexcept { return vectors_.rows(); }
  Eigen::Index dim() const noexcept { return vectors_.cols(); }
  std::uint64_t seed() const noexcept { return seed_; }

 private:
  Vector truth_;
  Matrix vectors_;
  Vector y_;
  std::uint64_t seed_ = 0;
};

SensingEnsemble generate_sensing_ensemble(const SensingGroundTruth& truth, Eigen::Index m, std::uint64_t seed);
PhaseProblem generate_phase_problem(const Vector& xstar, Eigen::Index m, std::uint64_t seed);

/// Characteristic magnitudes of a problem, used to scale tolerances.
struct ProblemScale {
  double domain = 1.0;    // |x*| or sqrt(lambda_k)
  double gradient = 1.0;  // |x*|^3 or lambda_k^{3/2}
  double hessian = 1.0;   // |x*|^2 or lambda_k
  double value = 1.0;     // |x*|^4 or lambda_k^2
};

struct Evaluation {
  double value = 0.0;
  Matrix gradient;
  std::optional<double> hess_form;
};

/// Behavioural interface shared by the four risks. Implementations are
/// immutable after construction.
class RiskModel {
 public:
  virtual ~RiskModel() = default;

  virtual std::string name() const = 0;
  virtual Eigen::Index rows() const = 0;
  virtual Eigen::Index cols() const = 0;
  /// True for factor models living on the quotient R_*^{N x k} / O_k.
  virtual bool factor_domain() const = 0;
  virtual ProblemScale scale() const = 0;

  virtual double value(const Matrix& p) const = 0;
  virtual Matrix euclidean_grad(const Matrix& p) const = 0;
  virtual Matrix hess_vec(const Matrix& p, const Matrix& d) const = 0;
  /// Evaluated from the quadratic-form expression, independent of hess_vec.
  virtual double hess_quadratic(const Matrix& p, const Matrix& d) const = 0;

  Evaluation evaluate(const Matrix& p, const std::optional<Matrix>& d = std::nullopt) const;

 protected:
  void check_point(const Matrix& p, const char* ctx) const;
};

class MsPopulation final : public RiskModel {
 public:
  explicit MsPopulation(SensingGroundTruth truth) : truth_(std::move(truth)) {}

  std::string name() const override { return "ms_population"; }
  Eigen::Index rows() const override { return truth_.dim(); }
  Eigen::Index cols() const override { return truth_.target_rank(); }
  bool factor_domain() const override { return true; }
  ProblemScale scale() const override;

  double value(const Matrix& u) const override;
  Matrix euclidean_grad(const Matrix& u) const override;
  Matrix hess_vec(const Matrix& u, const Matrix& d) const override;
  double hess_quadratic(const Matrix& u, const Matrix& d) const override;

  const SensingGroundTruth& truth() const noexcept { return truth_; }

 private:
  SensingGroundTruth truth_;
};

class MsEmpirical final : public RiskModel {
 public:
  MsEmpirical(std::shared_ptr<const SensingEnsemble> ensemble, SensingGroundTruth truth);

  std::string name() const override { return "ms_empirical"; }
  Eigen::Index rows() const override { return truth_.dim(); }
  Eigen::Index cols() const override { return truth_.target_rank(); }
  bool factor_domain() const override { return true; }
  ProblemScale scale() const override;

  double value(const Matrix& u) const override;
  Matrix euclidean_grad(const Matrix& u) const override;
  Matrix hess_vec(const Matrix& u, const Matrix& d) const override;
  double hess_quadratic(const Matrix& u, const Matrix& d) const override;

  const SensingEnsemble& ensemble() const noexcept { return *ensemble_; }
  const SensingGroundTruth& truth() const noexcept { return truth_; }

 private:
  std::shared_ptr<const SensingEnsemble> ensemble_;
  SensingGroundTruth truth_;
};

class PrPopulation final : public RiskModel {
 public:
  explicit PrPopulation(Vector xstar);

  std::string name() const override { return "pr_population"; }
  Eigen::Index rows() const override { return xstar_.size(); }
  Eigen::Index cols() const override { return 1; }
  bool factor_domain() const override { return false; }
  ProblemScale scale() const override;

  double value(const Matrix& x) const override;
  Matrix euclidean_grad(const Matrix& x) const override;
  Matrix hess_vec(const Matrix& x, const Matrix& d) const override;
  double hess_quadratic(const Matrix& x, const Matrix& d) const override;

  /// Closed-form Hessian 12 x x^T - 4 x* x*^T + (6|x|^2 - 2|x*|^2) I.
  Matrix hessian(const Vector& x) const;
  const Vector& xstar() const noexcept { return xstar_; }

 private:
  Vector xstar_;
};

class PrEmpirical final : public RiskModel {
 public:
  explicit PrEmpirical(std::shared_ptr<const PhaseProblem> problem);

  std::string name() const override { return "pr_empirical"; }
  Eigen::Index rows() const override { return problem_->dim(); }
  Eigen::Index cols() const override { return 1; }
  bool factor_domain() const override { return false; }
  ProblemScale scale() const override;

  double value(const Matrix& x) const override;
  Matrix euclidean_grad(const Matrix& x) const override;
  Matrix hess_vec(const Matrix& x, const Matrix& d) const override;
  double hess_quadratic(const Matrix& x, const Matrix& d) const override;

  /// (2/M) sum_m (3 <a_m,x>^2 - y_m) a_m a_m^T.
  Matrix hessian(const Vector& x) const;
  const PhaseProblem& problem() const noexcept { return *problem_; }

 private:
  std::shared_ptr<const PhaseProblem> problem_;
};

/// P_U(euclidean_grad(U)); only meaningful for factor models.
manifold::HorizontalTangent riemannian_grad(const RiskModel& model, const manifold::FactorPoint& u);

/// Riemannian gradient for factor models, Euclidean gradient otherwise.
Matrix domain_grad(const RiskModel& model, const Matrix& p);

// Replay containers: {kind, seed, dims, M, ...} with matrices as row-major
// float64 arrays.
nlohmann::json to_json(const SensingGroundTruth& truth);
SensingGroundTruth truth_from_json(const nlohmann::json& j);
nlohmann::json to_json(const SensingEnsemble& ensemble, const SensingGroundTruth& truth);
SensingEnsemble sensing_ensemble_from_json(const nlohmann::json& j);
nlohmann::json to_json(const PhaseProblem& problem);
PhaseProblem phase_problem_from_json(const nlohmann::json& j);

std::vector<double> row_major(const Matrix& m);
Matrix from_row_major(const std::vector<double>& data, Eigen::Index rows, Eigen::Index cols);

}  // namespace landscape_lab::risk
