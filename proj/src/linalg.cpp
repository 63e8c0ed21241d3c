#include "arsvd/linalg.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>

namespace arsvd {

QrFactors qr_thin(const Matrix& a) {
  const Index n = a.rows(), l = a.cols();
  if (n < l) {
    throw DimensionError("qr_thin: need rows >= cols, got " + shape_str(n, l));
  }
  Eigen::HouseholderQR<Matrix> qr(a);
  QrFactors f;
  f.q = qr.householderQ() * Matrix::Identity(n, l);
  f.r = qr.matrixQR().topRows(l).triangularView<Eigen::Upper>();
  // Fix signs so diag(R) >= 0; keeps Q R = a and makes the factorization
  // unique for full-rank input.
  for (Index i = 0; i < l; ++i) {
    if (f.r(i, i) < 0.0) {
      f.r.row(i) = -f.r.row(i);
      f.q.col(i) = -f.q.col(i);
    }
  }
  double dmax = 0.0;
  for (Index i = 0; i < l; ++i) dmax = std::max(dmax, std::abs(f.r(i, i)));
  for (Index i = 0; i < l; ++i) {
    if (std::abs(f.r(i, i)) <= 1e-12 * dmax) {
      f.rank_deficient = true;
      break;
    }
  }
  if (dmax == 0.0) f.rank_deficient = true;
  return f;
}

SvdFactors svd_exact(const Matrix& a) {
  if (!a.allFinite()) throw DataError("svd_exact: non-finite entries");
  SvdFactors f;
  const Index small = std::min(a.rows(), a.cols());
  if (small <= 32) {
    Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (svd.info() != Eigen::Success) {
      throw NumericalError("svd_exact: Jacobi iteration failed on " +
                           shape_str(a.rows(), a.cols()));
    }
    f.u = svd.matrixU();
    f.s = svd.singularValues();
    f.v = svd.matrixV();
  } else {
    Eigen::BDCSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (svd.info() != Eigen::Success) {
      throw NumericalError("svd_exact: divide-and-conquer failed on " +
                           shape_str(a.rows(), a.cols()));
    }
    f.u = svd.matrixU();
    f.s = svd.singularValues();
    f.v = svd.matrixV();
  }
  return f;
}

namespace {

void check_inner(Index ai, Index bi, const char* op, Index ar, Index ac,
                 Index br, Index bc) {
  if (ai != bi) {
    throw DimensionError(std::string(op) + ": inner dimensions disagree, " +
                         shape_str(ar, ac) + " vs " + shape_str(br, bc));
  }
}

}  // namespace

Matrix matmul(const Matrix& a, const Matrix& b) {
  check_inner(a.cols(), b.rows(), "matmul", a.rows(), a.cols(), b.rows(), b.cols());
  return a * b;
}

Matrix matmul_tn(const Matrix& a, const Matrix& b) {
  check_inner(a.rows(), b.rows(), "matmul_tn", a.rows(), a.cols(), b.rows(), b.cols());
  return a.transpose() * b;
}

Matrix matmul_nt(const Matrix& a, const Matrix& b) {
  check_inner(a.cols(), b.cols(), "matmul_nt", a.rows(), a.cols(), b.rows(), b.cols());
  return a * b.transpose();
}

}  // namespace arsvd
