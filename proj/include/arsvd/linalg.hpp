#pragma once

#include "arsvd/types.hpp"

namespace arsvd {

/// Thin QR with a sign-fixed, non-negative R diagonal.
struct QrFactors {
  Matrix q;  // n x l, orthonormal columns
  Matrix r;  // l x l, upper triangular, diag >= 0
  bool rank_deficient = false;  // some |R_ii| <= 1e-12 * max |R_jj|
};

struct SvdFactors {
  Matrix u;
  Vector s;  // non-increasing, >= 0
  Matrix v;
};

/// Thin QR of an n x l matrix, n >= l. Rank deficiency is flagged on the
/// result, not fatal; Q stays orthonormal either way.
QrFactors qr_thin(const Matrix& a);

/// Full-accuracy thin SVD, used both inside stage 2 and as the exact
/// reference in tests. Jacobi for small inner dimension, bidiagonal
/// divide-and-conquer otherwise.
SvdFactors svd_exact(const Matrix& a);

/// a * b with explicit shape validation (DimensionError names both shapes).
Matrix matmul(const Matrix& a, const Matrix& b);
/// a^T * b, reading a through a transpose view (no copy).
Matrix matmul_tn(const Matrix& a, const Matrix& b);
/// a * b^T, reading b through a transpose view (no copy).
Matrix matmul_nt(const Matrix& a, const Matrix& b);

}  // namespace arsvd
