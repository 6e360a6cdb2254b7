#include "landscape_lab/rng.hpp"

#include <cmath>
#include <numbers>

namespace landscape_lab {

std::uint64_t fnv1a64(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t stream_seed(std::uint64_t master_seed, std::string_view tag, std::uint64_t index) {
  std::uint64_t h = splitmix64(master_seed);
  h = splitmix64(h ^ fnv1a64(tag));
  return splitmix64(h ^ index);
}

double RngStream::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double RngStream::gaussian() {
  if (spare_) {
    double z = *spare_;
    spare_.reset();
    return z;
  }
  const double u1 = uniform_open_left();
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  return radius * std::cos(angle);
}

Matrix RngStream::gaussian_matrix(Eigen::Index rows, Eigen::Index cols, double stddev) {
  // Row-major fill order so the draw sequence matches the serialized layout.
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = gaussian(stddev);
  return m;
}

Vector RngStream::gaussian_vector(Eigen::Index n, double stddev) {
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = gaussian(stddev);
  return v;
}

Vector RngStream::unit_vector(Eigen::Index n) {
  Vector v;
  double norm = 0.0;
  do {
    v = gaussian_vector(n);
    norm = v.norm();
  } while (norm == 0.0);
  return v / norm;
}

Vector RngStream::in_ball(Eigen::Index n, double radius) {
  Vector dir = unit_vector(n);
  return dir * (radius * std::pow(uniform(), 1.0 / static_cast<double>(n)));
}

Matrix RngStream::orthogonal(Eigen::Index k) { return stiefel(k, k); }

Matrix RngStream::stiefel(Eigen::Index n, Eigen::Index k) {
  Matrix g = gaussian_matrix(n, k);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(n, k);
  Matrix r = qr.matrixQR().topLeftCorner(k, k);
  for (Eigen::Index j = 0; j < k; ++j)
    if (r(j, j) < 0.0) q.col(j) = -q.col(j);
  return q;
}

}  // namespace landscape_lab
