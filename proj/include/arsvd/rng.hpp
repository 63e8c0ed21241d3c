#pragma once

#include <random>

#include "arsvd/types.hpp"

namespace arsvd {

/// Deterministic pseudo-random stream keyed by (seed, stream).
///
/// The engine is std::mt19937_64 whose 64-bit raw output is fully specified
/// by the standard; normal variates come from a hand-rolled Box-Muller
/// transform. Together that makes every draw sequence reproducible across
/// runs for a fixed (seed, stream) pair, independent of platform RNG
/// library choices.
class Rng {
 public:
  explicit Rng(RngSeed s);

  /// Raw 64-bit word.
  std::uint64_t u64();

  /// Uniform on [0, 1) with 53-bit resolution.
  double uniform01();

  /// Uniform on (0, 1]; safe as a log() argument.
  double uniform_pos();

  /// Standard normal via Box-Muller (second variate cached).
  double normal();

  /// Exponential with rate 1.
  double exponential();

  /// Gamma(shape, 1) via Marsaglia-Tsang; shape > 0.
  double gamma(double shape);

  /// Index in [0, probs.size()) with the given probabilities (sum ~ 1).
  Index categorical(const Vector& probs);

  bool bernoulli(double p) { return uniform01() < p; }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// rows x cols matrix of iid standard normals, filled row by row.
Matrix gaussian_matrix(Index rows, Index cols, RngSeed seed);

/// Deterministic permutation of {0, ..., n-1} (Fisher-Yates over rng).
std::vector<Index> random_permutation(Index n, Rng& rng);

}  // namespace arsvd
