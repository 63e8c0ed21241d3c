#pragma once

#include <vector>

#include "arsvd/types.hpp"

namespace arsvd {

/// Per-direction stability of singular-vector estimates at a fixed
/// iteration depth t: mean absolute Spearman correlation across all pairs
/// of independent random projections.
struct StabilityProfile {
  int t = 0;
  Vector scores;           // d_max entries, each in [0, 1]
  int n_projections = 0;   // B
  bool degenerate = false; // a zero-variance vector was hit
};

/// Split of a stability profile into stable (signal) and unstable (noise)
/// directions at the rank-sum change point.
struct ChangePoint {
  int k_hat = 0;      // first noise index, 1-based
  int d_hat = 0;      // k_hat - 1 signal directions
  Vector p_values;    // over k = 2..d_max-1
  double min_p = 1.0;
  bool weak = false;       // min_p > 0.05
  bool degenerate = false; // all scores equal
};

struct BicvEntry {
  int t = 0;
  double median_error = 0.0;  // median over the 4 held-out blocks
  int d_hat = 0;              // median block rank estimate
  bool collapsed = false;     // some block predicted zero
};

struct BicvReport {
  std::vector<BicvEntry> per_t;
  int t_star = 1;
  int d_star = 0;
};

/// Everything the adaptive selection computed: full-matrix stability
/// diagnostics per t, plus the cross-validation sweep that picks (t*, d*).
struct SelectionReport {
  std::vector<StabilityProfile> profiles;    // t = 1..t_max, full matrix
  std::vector<ChangePoint> change_points;    // matching profiles
  BicvReport bicv;
  bool ell_clamped = false;
  bool degenerate_input = false;  // zero matrix

  [[nodiscard]] int t_star() const { return bicv.t_star; }
  [[nodiscard]] int d_star() const { return bicv.d_star; }
};

}  // namespace arsvd
