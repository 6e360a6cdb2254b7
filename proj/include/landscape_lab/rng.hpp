#pragma once

// Reproducible random streams.
//
// Generator: std::mt19937_64 (its output sequence is fixed by the C++
// standard). Every stream is seeded from
//     stream_seed = mix(master_seed, fnv1a64(tag), index)
// where mix is three chained splitmix64 finalizers. Gaussian variates use the
// basic Box-Muller transform on 53-bit uniforms, with the sine branch cached
// for the next call. Nothing here depends on std::*_distribution, whose
// algorithms are implementation-defined.

#include "landscape_lab/common.hpp"

#include <cstdint>
#include <optional>
#include <random>
#include <string_view>

namespace landscape_lab {

inline constexpr std::string_view kRngName = "mt19937_64/splitmix64-streams/box-muller v1";

std::uint64_t fnv1a64(std::string_view text);
std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t stream_seed(std::uint64_t master_seed, std::string_view tag, std::uint64_t index);

class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : engine_(seed) {}
  RngStream(std::uint64_t master_seed, std::string_view tag, std::uint64_t index)
      : RngStream(stream_seed(master_seed, tag, index)) {}

  /// Uniform on [0, 1).
  double uniform();
  /// Uniform on (0, 1].
  double uniform_open_left() { return 1.0 - uniform(); }
  double gaussian();
  double gaussian(double stddev) { return stddev * gaussian(); }

  Matrix gaussian_matrix(Eigen::Index rows, Eigen::Index cols, double stddev = 1.0);
  Vector gaussian_vector(Eigen::Index n, double stddev = 1.0);
  /// Uniform direction on the unit sphere of R^n.
  Vector unit_vector(Eigen::Index n);
  /// Uniform point in the Euclidean ball of the given radius.
  Vector in_ball(Eigen::Index n, double radius);
  /// Haar-distributed orthogonal matrix (QR of a Gaussian with sign fix).
  Matrix orthogonal(Eigen::Index k);
  /// N x k matrix with orthonormal columns, uniformly distributed.
  Matrix stiefel(Eigen::Index n, Eigen::Index k);

 private:
  std::mt19937_64 engine_;
  std::optional<double> spare_;
};

}  // namespace landscape_lab
