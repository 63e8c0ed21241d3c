#pragma once

#include <span>
#include <utility>
#include <vector>

#include "arsvd/factor.hpp"
#include "arsvd/select_report.hpp"

namespace arsvd {

/// |Spearman rank correlation| of two equal-length vectors (ties get
/// average ranks). A zero-variance input yields 0 and sets *degenerate.
double spearman_abs(std::span<const double> u, std::span<const double> w,
                    bool* degenerate = nullptr);

/// Two-sided Wilcoxon rank-sum p-value. Exact enumeration when
/// |a| + |b| <= 12; normal approximation with tie and continuity
/// corrections otherwise. All-tied input gives p = 1.
double wilcoxon_ranksum_p(std::span<const double> a, std::span<const double> b);

/// Stability profiles for every t = 1..t_max in one pass over B
/// independent projection chains.
std::vector<StabilityProfile> stability_profiles(const Matrix& x, int t_max,
                                                 Index d_max, int b,
                                                 RngSeed seed);

/// Single-t convenience wrapper (same draws as the sweep at depth t).
StabilityProfile stability_scores(const Matrix& x, int t, Index d_max, int b,
                                  RngSeed seed);

/// Stability scores from caller-supplied projections (testing hook; the
/// public entry points draw projections on sub-streams).
StabilityProfile stability_scores_from(const Matrix& x, int t,
                                       const std::vector<Matrix>& omegas);

/// Wilcoxon change point over stability scores; d_hat = k_hat - 1.
ChangePoint rank_changepoint(const StabilityProfile& profile);

/// Gabriel 2x2 holdout error at iteration depth t. Rows and columns are
/// split in half at random; each of the 4 blocks is held out in turn and
/// predicted as B D+ C with D factorized at its own stability-estimated
/// rank. Returns (median squared-Frobenius error, median rank estimate).
std::pair<double, int> bicv_error(const Matrix& x, int t,
                                  const ArsvdConfig& cfg, RngSeed split_seed);

/// Sweep t = 1..t_max on one shared split; t* = argmin median error
/// (ties to smaller t), d* = median block rank estimate at t*.
BicvReport select_t_and_d(const Matrix& x, const ArsvdConfig& cfg);

/// select_t_and_d plus full-matrix stability diagnostics for the report.
SelectionReport select_full(const Matrix& x, const ArsvdConfig& cfg);

}  // namespace arsvd
