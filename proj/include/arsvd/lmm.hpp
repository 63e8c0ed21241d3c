#pragma once

#include <optional>
#include <string>
#include <vector>

#include "arsvd/factor.hpp"

namespace arsvd {

struct GenotypeMatrix {
  Matrix raw;  // n individuals x p variants, entries in {0, 1, 2}
  std::vector<std::string> variant_ids;       // p names
  Matrix standardized;                        // n x p_kept, centered, unit variance
  std::vector<Index> kept;                    // original index per standardized column
  std::vector<Index> dropped_monomorphic;     // original indices of dropped columns

  [[nodiscard]] Index n() const { return raw.rows(); }
  [[nodiscard]] Index p() const { return raw.cols(); }
};

/// Column-center and scale to unit variance (1/(n-1) convention);
/// monomorphic columns are dropped and their indices recorded.
GenotypeMatrix standardize(Matrix raw, std::vector<std::string> variant_ids = {});

/// Truncated spectral representation of the relatedness matrix
/// K = G G^T / p_used, obtained from the randomized factorization of the
/// standardized design matrix itself (K is never formed).
struct GrmFactor {
  Matrix u;      // n x d*, orthonormal
  Vector lam;    // d* eigenvalues of K on the retained subspace, decreasing
  Index d_star = 0;
  Index p_used = 0;          // variants that entered the factorization
  double scaling = 0.0;      // 1 / p_used
  int t_star = 0;
  SelectionReport selection; // populated in adaptive mode
  bool adaptive = false;
};

/// Factor the (optionally column-excluded) standardized genotype matrix.
/// exclude holds original variant indices to leave out (leave-group-out).
/// Pass rank to skip the adaptive selection (t = t_max is then used).
GrmFactor grm_factor(const GenotypeMatrix& g, const ArsvdConfig& cfg,
                     const std::vector<Index>& exclude = {},
                     std::optional<Index> rank = std::nullopt);

enum class FitMethod { kML, kREML };

struct VarianceComponents {
  double sigma_g2 = 0.0;
  double sigma_e2 = 0.0;
  double delta = 0.0;  // sigma_e2 / sigma_g2
  double loglik = 0.0;
  FitMethod method = FitMethod::kML;
  bool boundary = false;  // optimum pinned at the delta grid edge
};

/// One-time variance-component fit under the null model
/// y ~ N(C beta, sigma_g^2 (U Lam U^T + delta I)). beta and sigma_g^2 are
/// profiled out; delta is maximized on a log grid refined by golden
/// section. Each evaluation works in the rotated d*-dimensional basis plus
/// analytic complement sums, never forming V.
VarianceComponents fit_null(const Vector& y, const Matrix& covariates,
                            const GrmFactor& k, FitMethod method = FitMethod::kML);

struct AssocResult {
  std::vector<std::string> variant_id;
  Vector beta;
  Vector se;
  Vector stat;  // Wald chi-square, 1 df
  Vector p;
  std::vector<std::uint8_t> flagged;  // zero variance after rotation
};

/// Per-variant generalized-least-squares scan with V fixed at the null
/// fit. Results cover every raw variant (dropped monomorphic columns get
/// p = 1, flagged) and are ordered by variant index. threads caps the
/// worker count for the per-variant loop; output is identical for any
/// value.
AssocResult assoc_scan(const GenotypeMatrix& g, const Vector& y,
                       const Matrix& covariates, const VarianceComponents& vc,
                       const GrmFactor& k, int threads = 1);

/// Ordinary least squares per variant, no random effect. The residual
/// variance is estimated once from the covariate-only null model (maximum
/// likelihood), so with unstructured data this agrees with assoc_scan at
/// sigma_g^2 = 0 exactly.
AssocResult naive_scan(const GenotypeMatrix& g, const Vector& y,
                       const Matrix& covariates, int threads = 1);

/// Survival function of chi-square with 1 df: erfc(sqrt(x/2)).
double chisq1_sf(double x);

}  // namespace arsvd
