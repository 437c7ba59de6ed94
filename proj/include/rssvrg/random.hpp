#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace rssvrg {

/// Seeded pseudo-random stream. Every solver run owns its streams; the same
/// seed always reproduces the same sequence on a given build.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed);

  /// Independent sub-stream keyed by (seed, stream, index). Used to give each
  /// epoch its own perturbation stream so that batches of different sizes
  /// share a common prefix.
  static RandomStream derive(std::uint64_t seed, std::uint64_t stream, std::uint64_t index = 0);

  double normal() { return normal_(engine_); }
  /// Uniform on [0, 1).
  double uniform() { return uniform_(engine_); }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform_(engine_); }
  /// Uniform index in [0, n).
  std::size_t index(std::size_t n);

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace rssvrg
