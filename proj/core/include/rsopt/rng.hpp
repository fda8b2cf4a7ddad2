#pragma once

#include <cstdint>
#include <random>

#include "rsopt/linalg.hpp"

namespace rsopt {

// Deterministic sub-seed derivation (splitmix64 finalizer over the mixed
// inputs). Distinct (seed, stream, index) triples give independent streams.
constexpr std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream,
                                 std::uint64_t index = 0) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1) +
                    0xbf58476d1ce4e5b9ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Seeded random stream producing circularly-symmetric complex Gaussians.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double normal() { return normal_(engine_); }

  /// CN(0, 1): independent real and imaginary parts of variance 1/2.
  Complex complex_normal() {
    constexpr double kHalfStd = 0.70710678118654752440;
    const double re = normal_(engine_);
    const double im = normal_(engine_);
    return {kHalfStd * re, kHalfStd * im};
  }

  CMat complex_normal_matrix(Eigen::Index rows, Eigen::Index cols) {
    CMat out(rows, cols);
    // column-major fill order is part of the determinism contract
    for (Eigen::Index j = 0; j < cols; ++j)
      for (Eigen::Index i = 0; i < rows; ++i) out(i, j) = complex_normal();
    return out;
  }

  std::uint64_t next_u64() { return engine_(); }
  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace rsopt
