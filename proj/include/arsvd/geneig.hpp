#pragma once

#include <optional>
#include <vector>

#include "arsvd/factor.hpp"

namespace arsvd {

struct PcaResult {
  Matrix components;          // p x d*, orthonormal columns
  Vector explained_variance;  // s^2 / n, non-increasing
  Matrix scores;              // n x d*
  Vector centering;           // column means removed before factorization
  SelectionReport selection;  // populated in adaptive mode
  bool adaptive = false;
  bool constant_columns = false;  // some input column had zero variance
};

/// PCA of the column-centered matrix via the randomized factorization;
/// components are right singular vectors. Pass rank to skip the adaptive
/// selection.
PcaResult pca(const Matrix& x, const ArsvdConfig& cfg,
              std::optional<Index> rank = std::nullopt);

/// Between-slice weighting kernel K = (1/n) sum_h (1/n_h) 1_h 1_h^T, so
/// Xc^T K Xc is the slice-size-weighted covariance of slice means.
struct SirKernel {
  Matrix k_xy;                 // n x n, symmetric
  Matrix sqrt_factor;          // n x H indicator square root, K = L L^T
  std::vector<int> slice_of;   // slice index per sample
  int n_slices = 0;
  bool merged_empty = false;   // an empty quantile slice was merged away
  bool degenerate = false;     // a single slice (constant response)
};

/// Quantile slices for a quantitative response; class = slice when the
/// response has at most n_slices distinct values.
SirKernel sir_kernel(const Vector& y, int n_slices);

struct GenEigResult {
  Matrix directions;   // p x r, unit columns
  Vector eigenvalues;  // descending, > 0
  Index gamma_rank = 0;
  bool dropped_small_sv = false;
  bool ridge_applied = false;
};

/// Low-rank generalized eigendecomposition Gamma g = lambda Sigma g with
/// Gamma = Xc^T K Xc factored through Xc^T L (never formed p x p) and
/// Sigma = (1/n) Xc^T Xc + ridge I. The problem is reduced to a dense
/// d* x d* eigendecomposition in the span of Gamma's factor.
GenEigResult geneig_lowrank(const Matrix& x, const SirKernel& kernel, Index r,
                            const ArsvdConfig& cfg, double ridge = 0.0);

}  // namespace arsvd
