#pragma once

#include <utility>
#include <vector>

#include "arsvd/linalg.hpp"
#include "arsvd/rng.hpp"
#include "arsvd/select_report.hpp"
#include "arsvd/types.hpp"

namespace arsvd {

struct ArsvdConfig {
  Index d_max = 0;   // rank upper bound
  int t_max = 10;    // max power iterations
  Index delta = 10;  // oversampling
  RngSeed seed;
  int stability_projections = 5;  // B, used by the adaptive selection

  void validate() const;

  /// Working width l = min(d_max + delta, min(rows, cols)); never exceeds
  /// the small dimension.
  [[nodiscard]] Index working_width(Index rows, Index cols) const;
};

/// Orthonormalized power-iteration block: spans (X X^T)^t Omega.
struct PowerBlock {
  int t = 0;
  Matrix basis;            // n x l, orthonormal columns
  bool degenerate = false; // zero input; basis is QR of Omega alone
};

struct LowRankFactorization {
  Matrix u;       // n x rank, orthonormal columns
  Vector s;       // non-increasing, >= 0
  Matrix v;       // p x rank, orthonormal columns
  Index rank = 0;
  int iterations = 0;  // t actually used

  [[nodiscard]] bool empty() const { return rank == 0; }
};

/// Incremental power-iteration chain over X. One chain produces the block
/// for every t in a single t_max-deep pass; each block is re-orthonormalized
/// after every application of X so large t cannot overflow.
///
/// When track_r is set, the chain also accumulates the (rescaled) triangular
/// product so the left singular vectors of the un-orthonormalized iterate
/// (X X^T)^t Omega can be recovered exactly; the stability selection needs
/// those, not just the span.
class PowerChain {
 public:
  PowerChain(const Matrix& x, Index width, RngSeed seed, bool track_r = false);

  void step();  // advance t by one
  [[nodiscard]] int t() const { return t_; }
  [[nodiscard]] const Matrix& basis() const { return q_; }
  [[nodiscard]] bool degenerate() const { return degenerate_; }

  /// Left singular vectors of (X X^T)^t Omega (requires track_r).
  [[nodiscard]] Matrix left_singular_vectors() const;

 private:
  const Matrix& x_;
  Matrix q_;        // current orthonormal block, n x l
  Matrix r_total_;  // accumulated triangular product (rescaled), l x l
  int t_ = 0;
  bool track_r_ = false;
  bool degenerate_ = false;
};

/// Blocks for t = 1..t_max, produced incrementally from one chain.
std::vector<PowerBlock> power_blocks(const Matrix& x, const ArsvdConfig& cfg);

/// Rank-d factorization from power block t: project B = X^T Q, take the
/// small SVD B = U S W^T, rotate back U_out = Q W, V_out = U, truncate.
/// Column signs are fixed so each u column's largest-magnitude entry is
/// positive.
LowRankFactorization arsvd_fixed(const Matrix& x, Index d, int t,
                                 const ArsvdConfig& cfg);

/// Stage-2 of arsvd_fixed given an already-built power block (shared by the
/// adaptive path so the chain is only run once).
LowRankFactorization arsvd_stage2(const Matrix& x, const Matrix& basis,
                                  Index d, int t);

struct AdaptiveResult {
  LowRankFactorization factor;
  SelectionReport report;
};

/// Full adaptive pipeline: pick (t*, d*) via stability + bi-cross-validation,
/// then factorize at that setting.
AdaptiveResult arsvd_adaptive(const Matrix& x, const ArsvdConfig& cfg);

}  // namespace arsvd
