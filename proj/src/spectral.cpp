#include "landscape_lab/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace landscape_lab::spectral {

namespace {

void fix_sign(Vector& v) {
  Eigen::Index idx = 0;
  v.cwiseAbs().maxCoeff(&idx);
  if (v(idx) < 0.0) v = -v;
}

Matrix reshape(const Vector& v, Eigen::Index rows, Eigen::Index cols) {
  return Eigen::Map<const Matrix>(v.data(), rows, cols);
}

Eigen::Map<const Vector> as_vec(const Matrix& m) { return {m.data(), m.size()}; }

}  // namespace

double relative_error(const Matrix& a, const Matrix& b) {
  const double diff = (a - b).norm();
  if (diff == 0.0) return 0.0;
  return diff / std::max(a.norm(), b.norm());
}

SymmetricMin min_eig_symmetric(const Matrix& h) {
  if (!h.allFinite()) throw Error(ErrorCode::NonFiniteEntry, "Hessian contains NaN/Inf");
  Eigen::SelfAdjointEigenSolver<Matrix> eig(h);
  if (eig.info() != Eigen::Success) throw Error(ErrorCode::NonFiniteEntry, "eigensolver failed");
  Vector v = eig.eigenvectors().col(0);
  fix_sign(v);
  const double lambda = eig.eigenvalues()(0);
  return {lambda, v, (h * v - lambda * v).norm()};
}

Matrix dense_hessian(const risk::RiskModel& model, const Matrix& p) {
  const Eigen::Index n = model.rows();
  const Eigen::Index k = model.cols();
  const Eigen::Index nk = n * k;
  Matrix h(nk, nk);
  for (Eigen::Index idx = 0; idx < nk; ++idx) {
    Matrix e = Matrix::Zero(n, k);
    e(idx % n, idx / n) = 1.0;
    h.col(idx) = as_vec(model.hess_vec(p, e));
  }
  return 0.5 * (h + h.transpose());
}

Matrix restricted_hessian(const risk::RiskModel& model, const Matrix& u, const Matrix& basis) {
  Matrix applied(basis.rows(), basis.cols());
  for (Eigen::Index j = 0; j < basis.cols(); ++j) {
    applied.col(j) = as_vec(model.hess_vec(u, reshape(basis.col(j), u.rows(), u.cols())));
  }
  Matrix b = basis.transpose() * applied;
  return 0.5 * (b + b.transpose());
}

SpectrumResult min_eig_euclidean(const risk::RiskModel& model, const Matrix& p) {
  const SymmetricMin m = min_eig_symmetric(dense_hessian(model, p));
  return {m.value, reshape(m.vector, p.rows(), p.cols()), m.residual};
}

SpectrumResult min_eig_horizontal(const risk::RiskModel& model, const manifold::FactorPoint& u) {
  const Matrix basis = manifold::horizontal_basis_matrix(u);
  const SymmetricMin m = min_eig_symmetric(restricted_hessian(model, u.entries(), basis));
  Vector ambient = basis * m.vector;
  fix_sign(ambient);
  return {m.value, reshape(ambient, u.n_rows(), u.n_cols()), m.residual};
}

SpectrumResult min_eig_domain(const risk::RiskModel& model, const Matrix& p) {
  if (model.factor_domain() && p.cols() > 1) return min_eig_horizontal(model, manifold::FactorPoint(p));
  return min_eig_euclidean(model, p);
}

FdReport fd_grad_check(const risk::RiskModel& model, const Matrix& p, double tol) {
  const double h = std::cbrt(std::numeric_limits<double>::epsilon()) * (1.0 + p.norm());
  Matrix fd(p.rows(), p.cols());
  for (Eigen::Index j = 0; j < p.cols(); ++j) {
    for (Eigen::Index i = 0; i < p.rows(); ++i) {
      Matrix plus = p;
      Matrix minus = p;
      plus(i, j) += h;
      minus(i, j) -= h;
      fd(i, j) = (model.value(plus) - model.value(minus)) / (2.0 * h);
    }
  }
  FdReport report;
  report.step = h;
  report.tol = tol;
  report.max_rel_error = relative_error(fd, model.euclidean_grad(p));
  report.pass = report.max_rel_error <= tol;
  return report;
}

FdReport fd_hess_check(const risk::RiskModel& model, const Matrix& p, const Matrix& d, double tol) {
  require_same_shape(p, d, "fd_hess_check");
  const double h = std::pow(std::numeric_limits<double>::epsilon(), 0.25) * (1.0 + p.norm());
  const Matrix fd = (model.euclidean_grad(p + h * d) - model.euclidean_grad(p - h * d)) / (2.0 * h);
  const double second =
      (model.value(p + h * d) - 2.0 * model.value(p) + model.value(p - h * d)) / (h * h);

  FdReport report;
  report.step = h;
  report.tol = tol;
  const Matrix hv = model.hess_vec(p, d);
  report.max_rel_error = relative_error(fd, hv);
  // The quadratic form can vanish for indefinite Hessians; scale by |Hd| |d|.
  const double quad = model.hess_quadratic(p, d);
  const double denom = std::max({std::abs(second), std::abs(quad), hv.norm() * d.norm()});
  report.quadratic_rel_error = denom == 0.0 ? 0.0 : std::abs(second - quad) / denom;
  report.pass = report.max_rel_error <= tol && report.quadratic_rel_error <= tol;
  return report;
}

}  // namespace landscape_lab::spectral
