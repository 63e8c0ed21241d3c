#include "arsvd/geneig.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <map>

namespace arsvd {

PcaResult pca(const Matrix& x, const ArsvdConfig& cfg,
              std::optional<Index> rank) {
  if (x.rows() < 2) throw ConfigError("pca: need at least 2 samples");
  PcaResult res;
  res.centering = x.colwise().mean().transpose();
  Matrix centered = x.rowwise() - res.centering.transpose();
  res.constant_columns = false;
  for (Index j = 0; j < centered.cols(); ++j) {
    if (centered.col(j).cwiseAbs().maxCoeff() == 0.0) {
      res.constant_columns = true;  // retained; centering already zeroed it
      break;
    }
  }

  LowRankFactorization f;
  if (rank.has_value()) {
    f = arsvd_fixed(centered, *rank, cfg.t_max, cfg);
  } else {
    AdaptiveResult ar = arsvd_adaptive(centered, cfg);
    f = std::move(ar.factor);
    res.selection = std::move(ar.report);
    res.adaptive = true;
  }
  res.components = f.v;
  res.explained_variance =
      f.s.array().square() / static_cast<double>(x.rows());
  res.scores = f.u * f.s.asDiagonal();
  return res;
}

SirKernel sir_kernel(const Vector& y, int n_slices) {
  const Index n = y.size();
  if (n_slices < 2) throw ConfigError("sir_kernel: need >= 2 slices");
  if (n < n_slices) throw ConfigError("sir_kernel: more slices than samples");

  SirKernel kern;
  kern.slice_of.assign(static_cast<std::size_t>(n), 0);

  // Distinct values <= n_slices: categorical response, slice = class.
  std::map<double, int> classes;
  for (Index i = 0; i < n; ++i) classes.emplace(y[i], 0);
  if (static_cast<int>(classes.size()) <= n_slices) {
    int next = 0;
    for (auto& [value, id] : classes) id = next++;
    for (Index i = 0; i < n; ++i) {
      kern.slice_of[static_cast<std::size_t>(i)] = classes.at(y[i]);
    }
    kern.n_slices = static_cast<int>(classes.size());
  } else {
    // Quantile slices: sort and cut into n_slices near-equal runs, keeping
    // tied values in one slice.
    std::vector<Index> order(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
    std::sort(order.begin(), order.end(),
              [&](Index a, Index b) { return y[a] < y[b]; });
    Index pos = 0;
    int slice = 0;
    while (pos < n) {
      Index target = ((slice + 1) * n) / n_slices;
      if (target <= pos) target = pos + 1;
      Index end = std::min(target, n);
      // Do not split ties across slices.
      while (end < n && y[order[static_cast<std::size_t>(end)]] ==
                            y[order[static_cast<std::size_t>(end - 1)]]) {
        ++end;
      }
      for (Index q = pos; q < end; ++q) {
        kern.slice_of[static_cast<std::size_t>(order[static_cast<std::size_t>(q)])] = slice;
      }
      pos = end;
      ++slice;
    }
    kern.n_slices = slice;
    kern.merged_empty = slice < n_slices;
  }
  kern.degenerate = kern.n_slices < 2;

  std::vector<Index> counts(static_cast<std::size_t>(kern.n_slices), 0);
  for (int s : kern.slice_of) ++counts[static_cast<std::size_t>(s)];

  // K = (1/n) sum_h (1/n_h) 1_h 1_h^T = L L^T with indicator square root L.
  kern.sqrt_factor = Matrix::Zero(n, kern.n_slices);
  const double inv_n = 1.0 / static_cast<double>(n);
  for (Index i = 0; i < n; ++i) {
    const int h = kern.slice_of[static_cast<std::size_t>(i)];
    kern.sqrt_factor(i, h) =
        std::sqrt(inv_n / static_cast<double>(counts[static_cast<std::size_t>(h)]));
  }
  kern.k_xy = kern.sqrt_factor * kern.sqrt_factor.transpose();
  return kern;
}

GenEigResult geneig_lowrank(const Matrix& x, const SirKernel& kernel, Index r,
                            const ArsvdConfig& cfg, double ridge) {
  const Index n = x.rows(), p = x.cols();
  if (kernel.sqrt_factor.rows() != n) {
    throw DimensionError("geneig: kernel built for " +
                         std::to_string(kernel.sqrt_factor.rows()) +
                         " samples, data has " + std::to_string(n));
  }
  if (ridge < 0.0) throw ConfigError("geneig: ridge must be >= 0");

  const Matrix centered = x.rowwise() - x.colwise().mean();
  // Low-rank factor of Gamma = (Xc^T L)(Xc^T L)^T; the p x p matrix is
  // never formed.
  const Matrix a = centered.transpose() * kernel.sqrt_factor;  // p x H

  SvdFactors fac;
  const Index l = cfg.working_width(a.rows(), a.cols());
  if (a.cols() <= l) {
    // Working width covers every column: the randomized pass would be the
    // identity, so take the small exact SVD directly.
    fac = svd_exact(a);
  } else {
    LowRankFactorization f = arsvd_fixed(a, l, cfg.t_max, cfg);
    fac.u = std::move(f.u);
    fac.s = std::move(f.s);
    fac.v = std::move(f.v);
  }

  GenEigResult res;
  Index d = 0;
  const double cut = (fac.s.size() > 0) ? 1e-10 * fac.s[0] : 0.0;
  while (d < fac.s.size() && fac.s[d] > cut && fac.s[d] > 0.0) ++d;
  res.dropped_small_sv = d < fac.s.size();
  if (d == 0) throw NumericalError("geneig: Gamma factor is numerically zero");
  res.gamma_rank = d;
  if (r < 1 || r > d) {
    throw ConfigError("geneig: requested r = " + std::to_string(r) +
                      " exceeds Gamma rank estimate " + std::to_string(d));
  }

  const Matrix u = fac.u.leftCols(d);
  const Vector s = fac.s.head(d);

  // M = S^-1 U^T Sigma U S^-1 with Sigma = (1/n) Xc^T Xc + ridge I;
  // U^T U = I collapses the ridge term to ridge * S^-2.
  const Matrix y = centered * u;  // n x d
  Matrix m = (y.transpose() * y) / static_cast<double>(n);
  if (ridge > 0.0) {
    m.diagonal().array() += ridge;
    res.ridge_applied = true;
  }
  const Vector s_inv = s.cwiseInverse();
  m = s_inv.asDiagonal() * m * s_inv.asDiagonal();

  Eigen::SelfAdjointEigenSolver<Matrix> eig(m);
  if (eig.info() != Eigen::Success) {
    throw NumericalError("geneig: dense eigendecomposition failed");
  }
  // Eigenvalues of M are 1/lambda: ascending mu <=> descending lambda.
  if (eig.eigenvalues()[0] <= 0.0) {
    throw NumericalError(
        "geneig: reduced matrix not positive definite; add ridge "
        "(suggest 1e-6 * trace(Sigma)/p)");
  }

  res.directions.resize(p, r);
  res.eigenvalues.resize(r);
  for (Index i = 0; i < r; ++i) {
    res.eigenvalues[i] = 1.0 / eig.eigenvalues()[i];
    Vector g = u * (s_inv.asDiagonal() * eig.eigenvectors().col(i));
    g /= g.norm();
    Index imax = 0;
    g.cwiseAbs().maxCoeff(&imax);
    if (g[imax] < 0.0) g = -g;
    res.directions.col(i) = g;
  }
  return res;
}

}  // namespace arsvd
