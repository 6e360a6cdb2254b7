#pragma once

// Geometry of the quotient R_*^{N x k} / O_k: full-rank factors U modulo
// U -> UQ with Q orthogonal.
//
//   vertical space at U    V_U = { U Omega : Omega^T = -Omega }
//   horizontal space at U  H_U = { D : D^T U = U^T D }
//   projection onto H_U    P_U(Z) = Z - U Omega,
//                          Omega G + G Omega = U^T Z - Z^T U,  G = U^T U

#include "landscape_lab/common.hpp"

#include <vector>

namespace landscape_lab::manifold {

/// Tolerance for the horizontality residual, relative to |D|_F |U|_F.
inline constexpr double kHorizontalTol = 1e-10;
/// A Gram matrix counts as SPD when its smallest eigenvalue exceeds this
/// fraction of the largest.
inline constexpr double kGramRelTol = 1e-12;
/// Projected canonical vectors shorter than this are dropped from the basis.
inline constexpr double kBasisDropTol = 1e-8;

/// A full-column-rank N x k factor.
class FactorPoint {
 public:
  /// Throws RankDeficient if sigma_k(U)^2 <= kGramRelTol * sigma_1(U)^2 (or U = 0),
  /// DimensionMismatch if k > N or the matrix is empty.
  explicit FactorPoint(Matrix entries);

  const Matrix& entries() const noexcept { return entries_; }
  Eigen::Index n_rows() const noexcept { return entries_.rows(); }
  Eigen::Index n_cols() const noexcept { return entries_.cols(); }
  double sigma_min() const noexcept { return sigma_min_; }
  double sigma_max() const noexcept { return sigma_max_; }

 private:
  Matrix entries_;
  double sigma_min_ = 0.0;
  double sigma_max_ = 0.0;
};

/// Skew-symmetric k x k matrix. Only the strict lower triangle is stored, so
/// Omega + Omega^T = 0 holds exactly.
class SkewFactor {
 public:
  explicit SkewFactor(Eigen::Index k) : lower_(Matrix::Zero(k, k)) {}
  /// Keeps the skew part 0.5 (A - A^T) of a square matrix.
  static SkewFactor from_matrix(const Matrix& a);

  Eigen::Index size() const noexcept { return lower_.rows(); }
  Matrix matrix() const;

 private:
  Matrix lower_;
};

/// A tangent matrix D at base U with D^T U = U^T D.
class HorizontalTangent {
 public:
  /// Throws NotHorizontal if the symmetry residual exceeds kHorizontalTol.
  HorizontalTangent(FactorPoint base, Matrix entries);
  /// As above, measuring the residual against max(|D|_F, reference_norm). Used
  /// when D results from a cancellation of a larger ambient matrix.
  HorizontalTangent(FactorPoint base, Matrix entries, double reference_norm);

  const Matrix& entries() const noexcept { return entries_; }
  const FactorPoint& base() const noexcept { return base_; }

 private:
  FactorPoint base_;
  Matrix entries_;
};

/// |D^T U - U^T D|_F / (|D|_F |U|_F); zero for D = 0.
double horizontality_residual(const Matrix& base, const Matrix& d);

/// Solves Omega G + G Omega = S for skew Omega via G = V diag(g) V^T:
/// (V^T Omega V)_ij = (V^T S V)_ij / (g_i + g_j).
SkewFactor solve_skew_sylvester(const Matrix& gram, const Matrix& rhs);

HorizontalTangent horizontal_project(const FactorPoint& base, const Matrix& ambient);

/// min over orthogonal P of |U - V P|_F (reflections allowed). The optimal P is
/// A B^T from the SVD V^T U = A Sigma B^T; the residual is formed explicitly.
double procrustes_distance(const Matrix& u, const Matrix& v);
double procrustes_distance(const FactorPoint& u, const FactorPoint& v);

/// The minimizing orthogonal P for procrustes_distance(u, v).
Matrix procrustes_rotation(const Matrix& u, const Matrix& v);

/// Orthonormal (Frobenius) basis of H_U, of size Nk - k(k-1)/2, built by
/// projecting the canonical basis and running column-pivoted Gram-Schmidt.
std::vector<HorizontalTangent> horizontal_basis(const FactorPoint& base);

/// The same basis as columns of an (Nk) x dim matrix, vec() being column-major.
Matrix horizontal_basis_matrix(const FactorPoint& base);

inline Eigen::Index horizontal_dimension(Eigen::Index n, Eigen::Index k) {
  return n * k - k * (k - 1) / 2;
}

}  // namespace landscape_lab::manifold
