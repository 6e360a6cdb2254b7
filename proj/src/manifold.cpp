#include "landscape_lab/manifold.hpp"

#include <algorithm>
#include <cmath>

namespace landscape_lab::manifold {

FactorPoint::FactorPoint(Matrix entries) : entries_(std::move(entries)) {
  if (entries_.size() == 0 || entries_.cols() > entries_.rows()) {
    throw Error(ErrorCode::DimensionMismatch, "factor must be N x k with 1 <= k <= N");
  }
  if (!entries_.allFinite()) throw Error(ErrorCode::NonFiniteEntry, "factor has NaN/Inf entries");
  Eigen::JacobiSVD<Matrix> svd(entries_);
  const auto& s = svd.singularValues();
  sigma_max_ = s(0);
  sigma_min_ = s(s.size() - 1);
  if (sigma_max_ == 0.0 || sigma_min_ * sigma_min_ <= kGramRelTol * sigma_max_ * sigma_max_) {
    throw Error(ErrorCode::RankDeficient,
                "sigma_k(U) = " + std::to_string(sigma_min_) + ", sigma_1(U) = " + std::to_string(sigma_max_));
  }
}

SkewFactor SkewFactor::from_matrix(const Matrix& a) {
  if (a.rows() != a.cols()) throw Error(ErrorCode::DimensionMismatch, "skew factor must be square");
  SkewFactor out(a.rows());
  for (Eigen::Index i = 1; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < i; ++j) out.lower_(i, j) = 0.5 * (a(i, j) - a(j, i));
  return out;
}

Matrix SkewFactor::matrix() const {
  Matrix lower = lower_.triangularView<Eigen::StrictlyLower>();
  return lower - lower.transpose();
}

double horizontality_residual(const Matrix& base, const Matrix& d) {
  require_same_shape(base, d, "horizontality_residual");
  const double scale = d.norm() * base.norm();
  if (scale == 0.0) return 0.0;
  Matrix m = d.transpose() * base;
  return (m - m.transpose()).norm() / scale;
}

HorizontalTangent::HorizontalTangent(FactorPoint base, Matrix entries)
    : HorizontalTangent(std::move(base), std::move(entries), 0.0) {}

HorizontalTangent::HorizontalTangent(FactorPoint base, Matrix entries, double reference_norm)
    : base_(std::move(base)), entries_(std::move(entries)) {
  require_same_shape(base_.entries(), entries_, "HorizontalTangent");
  const double norm = entries_.norm();
  double res = horizontality_residual(base_.entries(), entries_);
  if (reference_norm > norm && norm > 0.0) res *= norm / reference_norm;
  if (res > kHorizontalTol) {
    throw Error(ErrorCode::NotHorizontal, "relative residual " + std::to_string(res));
  }
}

SkewFactor solve_skew_sylvester(const Matrix& gram, const Matrix& rhs) {
  const Eigen::Index k = gram.rows();
  if (gram.cols() != k || rhs.rows() != k || rhs.cols() != k) {
    throw Error(ErrorCode::DimensionMismatch, "Sylvester operands must be k x k");
  }
  if ((gram - gram.transpose()).norm() > 1e-12 * std::max(1.0, gram.norm())) {
    throw Error(ErrorCode::GramNotSPD, "Gram matrix is not symmetric");
  }
  const double rhs_norm = rhs.norm();
  if ((rhs + rhs.transpose()).norm() > 1e-10 * rhs_norm) {
    throw Error(ErrorCode::NotSkew, "right-hand side is not skew-symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(gram);
  const Vector& g = eig.eigenvalues();
  if (!(g(0) > kGramRelTol * g(k - 1)) || !(g(k - 1) > 0.0)) {
    throw Error(ErrorCode::GramNotSPD, "min eigenvalue " + std::to_string(g(0)) + ", max " +
                                           std::to_string(g(k - 1)));
  }
  const Matrix& v = eig.eigenvectors();
  Matrix t = v.transpose() * rhs * v;
  for (Eigen::Index i = 0; i < k; ++i)
    for (Eigen::Index j = 0; j < k; ++j) t(i, j) /= g(i) + g(j);
  return SkewFactor::from_matrix(v * t * v.transpose());
}

HorizontalTangent horizontal_project(const FactorPoint& base, const Matrix& ambient) {
  const Matrix& u = base.entries();
  require_same_shape(u, ambient, "horizontal_project");
  Matrix m = u.transpose() * ambient;
  const SkewFactor omega = solve_skew_sylvester(u.transpose() * u, m - m.transpose());
  return HorizontalTangent(base, ambient - u * omega.matrix(), ambient.norm());
}

Matrix procrustes_rotation(const Matrix& u, const Matrix& v) {
  require_same_shape(u, v, "procrustes_distance");
  Eigen::JacobiSVD<Matrix> svd(v.transpose() * u, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().transpose();
}

double procrustes_distance(const Matrix& u, const Matrix& v) {
  return (u - v * procrustes_rotation(u, v)).norm();
}

double procrustes_distance(const FactorPoint& u, const FactorPoint& v) {
  return procrustes_distance(u.entries(), v.entries());
}

namespace {

Eigen::Map<const Vector> as_vec(const Matrix& m) { return {m.data(), m.size()}; }

}  // namespace

Matrix horizontal_basis_matrix(const FactorPoint& base) {
  const Eigen::Index n = base.n_rows();
  const Eigen::Index k = base.n_cols();
  const Eigen::Index nk = n * k;

  Matrix candidates(nk, nk);
  for (Eigen::Index idx = 0; idx < nk; ++idx) {
    Matrix e = Matrix::Zero(n, k);
    e(idx % n, idx / n) = 1.0;
    const Matrix d = horizontal_project(base, e).entries();
    candidates.col(idx) = as_vec(d);
  }

  const Eigen::Index dim = horizontal_dimension(n, k);
  Matrix basis(nk, dim);
  std::vector<bool> used(static_cast<std::size_t>(nk), false);
  Eigen::Index found = 0;
  while (found < dim) {
    Eigen::Index pivot = -1;
    double best = 0.0;
    for (Eigen::Index c = 0; c < nk; ++c) {
      if (used[static_cast<std::size_t>(c)]) continue;
      const double norm = candidates.col(c).norm();
      if (norm > best) {
        best = norm;
        pivot = c;
      }
    }
    if (pivot < 0 || best < kBasisDropTol) break;
    used[static_cast<std::size_t>(pivot)] = true;
    Vector q = candidates.col(pivot) / best;
    // Second pass of orthogonalization keeps the Gram matrix at roundoff level.
    q -= basis.leftCols(found) * (basis.leftCols(found).transpose() * q);
    q.normalize();
    basis.col(found++) = q;
    for (Eigen::Index c = 0; c < nk; ++c) {
      if (used[static_cast<std::size_t>(c)]) continue;
      candidates.col(c) -= q * q.dot(candidates.col(c));
    }
  }
  if (found != dim) {
    throw Error(ErrorCode::GramNotSPD, "horizontal basis has " + std::to_string(found) + " elements, expected " +
                                           std::to_string(dim));
  }
  return basis;
}

std::vector<HorizontalTangent> horizontal_basis(const FactorPoint& base) {
  const Matrix b = horizontal_basis_matrix(base);
  std::vector<HorizontalTangent> out;
  out.reserve(static_cast<std::size_t>(b.cols()));
  for (Eigen::Index j = 0; j < b.cols(); ++j) {
    Matrix d = Eigen::Map<const Matrix>(b.col(j).data(), base.n_rows(), base.n_cols());
    out.emplace_back(base, std::move(d));
  }
  return out;
}

}  // namespace landscape_lab::manifold
