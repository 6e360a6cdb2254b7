#pragma once

#include "landscape_lab/common.hpp"
#include "landscape_lab/manifold.hpp"
#include "landscape_lab/risk_models.hpp"

namespace landscape_lab::spectral {

struct SpectrumResult {
  double lambda_min = 0.0;
  /// Unit eigenvector reshaped to the point's shape (a horizontal tangent for
  /// min_eig_horizontal). Sign fixed so the largest-magnitude entry is positive.
  Matrix eigvec;
  double residual = 0.0;
};

/// Smallest eigenpair of a dense symmetric matrix. Throws NonFiniteEntry on NaN/Inf.
struct SymmetricMin {
  double value;
  Vector vector;
  double residual;
};
SymmetricMin min_eig_symmetric(const Matrix& h);

/// Ambient (Nk x Nk) Hessian assembled from hess_vec on the canonical basis,
/// vec() being column-major; symmetrized.
Matrix dense_hessian(const risk::RiskModel& model, const Matrix& p);

/// B_ij = <hess_vec(u, E_j), E_i> for basis columns E (an (Nk) x d matrix), symmetrized.
Matrix restricted_hessian(const risk::RiskModel& model, const Matrix& u, const Matrix& basis);

SpectrumResult min_eig_euclidean(const risk::RiskModel& model, const Matrix& p);
SpectrumResult min_eig_horizontal(const risk::RiskModel& model, const manifold::FactorPoint& u);

/// Horizontal spectrum for factor models with k > 1, Euclidean otherwise.
/// Rank-1 factor models are treated as living on R^N, so u = 0 is allowed.
SpectrumResult min_eig_domain(const risk::RiskModel& model, const Matrix& p);

struct FdReport {
  double max_rel_error = 0.0;
  /// Hessian checks also compare hess_quadratic with a second difference of value.
  double quadratic_rel_error = 0.0;
  double step = 0.0;
  double tol = 0.0;
  bool pass = true;
};

/// Central differences of value against euclidean_grad, step eps^{1/3} (1 + |p|_F).
FdReport fd_grad_check(const risk::RiskModel& model, const Matrix& p, double tol);
/// Central differences of the gradient along d against hess_vec(p, d), and a
/// second difference of value against hess_quadratic; step eps^{1/4} (1 + |p|_F).
FdReport fd_hess_check(const risk::RiskModel& model, const Matrix& p, const Matrix& d, double tol);

/// |a - b| / max(|a|, |b|), zero when both vanish.
double relative_error(const Matrix& a, const Matrix& b);

}  // namespace landscape_lab::spectral
