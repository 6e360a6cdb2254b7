#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <string_view>

namespace landscape_lab {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline constexpr std::string_view kVersion = "0.3.1";

enum class ErrorCode {
  DimensionMismatch,
  GramNotSPD,
  NotSkew,
  NotHorizontal,
  RankDeficient,
  InvalidSampleCount,
  NonFiniteEntry,
  SamplerStarved,
  InvalidConfig,
  InvalidRank,
  ZeroTruthSignal,
  NoConvergence,
  InvalidTruth,
};

std::string_view to_string(ErrorCode code);

/// Single exception type for the library; callers branch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Frobenius inner product.
inline double inner(const Matrix& a, const Matrix& b) { return a.cwiseProduct(b).sum(); }

inline void require_same_shape(const Matrix& a, const Matrix& b, const char* ctx) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw Error(ErrorCode::DimensionMismatch,
                std::string(ctx) + ": " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                    " vs " + std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
  }
}

}  // namespace landscape_lab
