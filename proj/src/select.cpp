#include "arsvd/select.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <numeric>

namespace arsvd {

namespace {

// Average ranks (1-based) with ties sharing the mean rank of their run.
std::vector<double> average_ranks(std::span<const double> v) {
  const std::size_t n = v.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && v[order[j + 1]] == v[order[i]]) ++j;
    const double mean_rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = mean_rank;
    i = j + 1;
  }
  return ranks;
}

double pearson(const std::vector<double>& a, const std::vector<double>& b,
               bool* degenerate) {
  const auto n = static_cast<double>(a.size());
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  double saa = 0.0, sbb = 0.0, sab = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double da = a[i] - ma, db = b[i] - mb;
    saa += da * da;
    sbb += db * db;
    sab += da * db;
  }
  if (saa <= 0.0 || sbb <= 0.0) {
    if (degenerate) *degenerate = true;
    return 0.0;
  }
  return sab / std::sqrt(saa * sbb);
}

double median4(std::array<double, 4> v) {
  std::sort(v.begin(), v.end());
  return 0.5 * (v[1] + v[2]);
}

// Lower median for the integer rank estimate (conservative).
int median4_low(std::array<int, 4> v) {
  std::sort(v.begin(), v.end());
  return v[1];
}

Matrix submatrix(const Matrix& x, const std::vector<Index>& rows,
                 const std::vector<Index>& cols) {
  Matrix out(static_cast<Index>(rows.size()), static_cast<Index>(cols.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < cols.size(); ++j) {
      out(static_cast<Index>(i), static_cast<Index>(j)) = x(rows[i], cols[j]);
    }
  }
  return out;
}

std::vector<double> column_of(const Matrix& m, Index k) {
  std::vector<double> col(static_cast<std::size_t>(m.rows()));
  for (Index i = 0; i < m.rows(); ++i) col[static_cast<std::size_t>(i)] = m(i, k);
  return col;
}

StabilityProfile scores_from_estimates(const std::vector<Matrix>& u_estimates,
                                       int t) {
  const auto b = static_cast<int>(u_estimates.size());
  const Index d = u_estimates.front().cols();
  StabilityProfile prof;
  prof.t = t;
  prof.n_projections = b;
  prof.scores = Vector::Zero(d);
  const double n_pairs = 0.5 * b * (b - 1);
  for (Index k = 0; k < d; ++k) {
    double acc = 0.0;
    for (int b1 = 0; b1 < b; ++b1) {
      const auto col1 = column_of(u_estimates[static_cast<std::size_t>(b1)], k);
      for (int b2 = b1 + 1; b2 < b; ++b2) {
        const auto col2 = column_of(u_estimates[static_cast<std::size_t>(b2)], k);
        bool deg = false;
        acc += spearman_abs(col1, col2, &deg);
        prof.degenerate = prof.degenerate || deg;
      }
    }
    prof.scores[k] = acc / n_pairs;
  }
  return prof;
}

}  // namespace

double spearman_abs(std::span<const double> u, std::span<const double> w,
                    bool* degenerate) {
  if (u.size() != w.size()) {
    throw DimensionError("spearman_abs: lengths differ, " +
                         std::to_string(u.size()) + " vs " +
                         std::to_string(w.size()));
  }
  if (u.size() < 3) throw ConfigError("spearman_abs: need length >= 3");
  const auto ru = average_ranks(u);
  const auto rw = average_ranks(w);
  return std::abs(pearson(ru, rw, degenerate));
}

double wilcoxon_ranksum_p(std::span<const double> a, std::span<const double> b) {
  const std::size_t m = a.size(), n = b.size();
  if (m < 1 || n < 1) throw ConfigError("wilcoxon_ranksum_p: empty sample");
  const std::size_t total = m + n;
  std::vector<double> pooled;
  pooled.reserve(total);
  pooled.insert(pooled.end(), a.begin(), a.end());
  pooled.insert(pooled.end(), b.begin(), b.end());

  bool all_tied = true;
  for (std::size_t i = 1; i < total; ++i) {
    if (pooled[i] != pooled[0]) {
      all_tied = false;
      break;
    }
  }
  if (all_tied) return 1.0;

  const auto ranks = average_ranks(pooled);
  double w = 0.0;
  for (std::size_t i = 0; i < m; ++i) w += ranks[i];
  const double mu = static_cast<double>(m) * (static_cast<double>(total) + 1.0) / 2.0;
  const double dev = std::abs(w - mu);

  if (total <= 12) {
    // Exact: every way of assigning m of the pooled ranks to sample a is
    // equally likely under the null; ties are handled by enumerating the
    // actual average-rank multiset.
    std::vector<std::size_t> idx(m);
    std::iota(idx.begin(), idx.end(), 0);
    std::size_t count = 0, extreme = 0;
    for (;;) {
      double ws = 0.0;
      for (std::size_t i : idx) ws += ranks[i];
      ++count;
      if (std::abs(ws - mu) >= dev - 1e-9) ++extreme;
      // next combination
      std::size_t i = m;
      while (i > 0) {
        --i;
        if (idx[i] != i + total - m) {
          ++idx[i];
          for (std::size_t j = i + 1; j < m; ++j) idx[j] = idx[j - 1] + 1;
          break;
        }
        if (i == 0) {
          return static_cast<double>(extreme) / static_cast<double>(count);
        }
      }
    }
  }

  // Normal approximation with tie correction.
  double tie_term = 0.0;
  {
    std::vector<double> sorted(pooled);
    std::sort(sorted.begin(), sorted.end());
    std::size_t i = 0;
    while (i < total) {
      std::size_t j = i;
      while (j + 1 < total && sorted[j + 1] == sorted[i]) ++j;
      const double t = static_cast<double>(j - i + 1);
      tie_term += t * t * t - t;
      i = j + 1;
    }
  }
  const double nn = static_cast<double>(total);
  const double var =
      (static_cast<double>(m) * static_cast<double>(n) / 12.0) *
      ((nn + 1.0) - tie_term / (nn * (nn - 1.0)));
  if (var <= 0.0) return 1.0;
  const double z = std::max(dev - 0.5, 0.0) / std::sqrt(var);
  const double p = std::erfc(z / std::numbers::sqrt2);
  return std::min(1.0, std::max(p, 1e-300));
}

StabilityProfile stability_scores_from(const Matrix& x, int t,
                                       const std::vector<Matrix>& omegas) {
  if (omegas.size() < 2) throw ConfigError("stability: need >= 2 projections");
  std::vector<Matrix> u_estimates;
  u_estimates.reserve(omegas.size());
  for (const Matrix& omega : omegas) {
    if (omega.rows() != x.rows()) {
      throw DimensionError("stability: projection rows " +
                           shape_str(omega.rows(), omega.cols()) +
                           " do not match data " + shape_str(x.rows(), x.cols()));
    }
    QrFactors qr = qr_thin(omega);
    Matrix q = std::move(qr.q);
    Matrix r_total = std::move(qr.r);
    for (int step = 0; step < t; ++step) {
      QrFactors h = qr_thin(Matrix(x.transpose() * q));
      QrFactors g = qr_thin(Matrix(x * h.q));
      r_total = g.r * (h.r * r_total);
      const double m = r_total.cwiseAbs().maxCoeff();
      if (m > 0.0) r_total /= m;
      q = std::move(g.q);
    }
    SvdFactors f = svd_exact(r_total);
    u_estimates.push_back(q * f.u);
  }
  return scores_from_estimates(u_estimates, t);
}

std::vector<StabilityProfile> stability_profiles(const Matrix& x, int t_max,
                                                 Index d_max, int b,
                                                 RngSeed seed) {
  if (b < 2) throw ConfigError("stability: need >= 2 projections");
  if (d_max > std::min(x.rows(), x.cols())) {
    throw ConfigError("stability: d_max exceeds min dimension");
  }
  std::vector<PowerChain> chains;
  chains.reserve(static_cast<std::size_t>(b));
  for (int i = 0; i < b; ++i) {
    chains.emplace_back(x, d_max, seed.sub(static_cast<std::uint64_t>(i)),
                        /*track_r=*/true);
  }
  std::vector<StabilityProfile> out;
  out.reserve(static_cast<std::size_t>(t_max));
  std::vector<Matrix> u_estimates(static_cast<std::size_t>(b));
  for (int t = 1; t <= t_max; ++t) {
    for (int i = 0; i < b; ++i) {
      chains[static_cast<std::size_t>(i)].step();
      u_estimates[static_cast<std::size_t>(i)] =
          chains[static_cast<std::size_t>(i)].left_singular_vectors();
    }
    out.push_back(scores_from_estimates(u_estimates, t));
  }
  return out;
}

StabilityProfile stability_scores(const Matrix& x, int t, Index d_max, int b,
                                  RngSeed seed) {
  return stability_profiles(x, t, d_max, b, seed).back();
}

ChangePoint rank_changepoint(const StabilityProfile& profile) {
  const Index d_max = profile.scores.size();
  if (d_max < 4) {
    throw ConfigError(
        "rank_changepoint: need d_max >= 4 stability scores (got " +
        std::to_string(d_max) + "); raise d_max");
  }
  ChangePoint cp;
  cp.p_values = Vector::Zero(d_max - 2);
  const double* s = profile.scores.data();
  double best = 2.0;
  for (Index k = 2; k <= d_max - 1; ++k) {
    // Scores 1..k-1 against k..d_max (1-based).
    const double p = wilcoxon_ranksum_p(
        std::span<const double>(s, static_cast<std::size_t>(k - 1)),
        std::span<const double>(s + (k - 1),
                                static_cast<std::size_t>(d_max - k + 1)));
    cp.p_values[k - 2] = p;
    if (p < best) {
      best = p;
      cp.k_hat = static_cast<int>(k);
    }
  }
  cp.min_p = best;
  cp.d_hat = cp.k_hat - 1;
  cp.weak = best > 0.05;
  cp.degenerate = true;
  for (Index i = 1; i < d_max; ++i) {
    if (profile.scores[i] != profile.scores[0]) {
      cp.degenerate = false;
      break;
    }
  }
  return cp;
}

namespace {

struct BlockSweep {
  std::vector<double> error;  // per t
  std::vector<int> d_hat;     // per t
  bool collapsed = false;
};

// One held-out block: A predicted as B D+ C, with D factorized at its
// stability-estimated rank for each t (single incremental chain).
BlockSweep bicv_block_sweep(const Matrix& a, const Matrix& b, const Matrix& c,
                            const Matrix& d, int t_hi, const ArsvdConfig& cfg,
                            RngSeed stab_seed, RngSeed chain_seed) {
  BlockSweep sweep;
  const Index eff_d_max = std::min(cfg.d_max, std::min(d.rows(), d.cols()));
  std::vector<int> ranks_per_t;
  if (eff_d_max >= 4) {
    const auto profiles = stability_profiles(d, t_hi, eff_d_max,
                                             cfg.stability_projections, stab_seed);
    for (const auto& prof : profiles) {
      ranks_per_t.push_back(rank_changepoint(prof).d_hat);
    }
  } else {
    // Block too small for a change point; rank-1 is the only safe choice.
    ranks_per_t.assign(static_cast<std::size_t>(t_hi), 1);
  }

  const Index l = cfg.working_width(d.rows(), d.cols());
  PowerChain chain(d, l, chain_seed);
  const double a_norm2 = a.squaredNorm();
  for (int t = 1; t <= t_hi; ++t) {
    chain.step();
    const int dh = ranks_per_t[static_cast<std::size_t>(t - 1)];
    LowRankFactorization f = arsvd_stage2(d, chain.basis(), dh, t);
    // Truncated pseudoinverse: drop singular values below 1e-10 * s1.
    Index keep = 0;
    const double cut = (f.s.size() > 0) ? 1e-10 * f.s[0] : 0.0;
    while (keep < f.s.size() && f.s[keep] > cut && f.s[keep] > 0.0) ++keep;
    double err;
    if (keep == 0) {
      err = a_norm2;  // rank collapse: predict zero
      sweep.collapsed = true;
    } else {
      const Matrix bv = b * f.v.leftCols(keep);                   // n1 x keep
      const Matrix uc = f.u.leftCols(keep).transpose() * c;       // keep x p1
      const Matrix pred =
          bv * f.s.head(keep).cwiseInverse().asDiagonal() * uc;   // n1 x p1
      err = (a - pred).squaredNorm();
    }
    sweep.error.push_back(err);
    sweep.d_hat.push_back(dh);
  }
  return sweep;
}

std::vector<BicvEntry> bicv_sweep(const Matrix& x, int t_hi,
                                  const ArsvdConfig& cfg, RngSeed split_seed) {
  const Index n = x.rows(), p = x.cols();
  if (n < 4 || p < 4) {
    throw DataError("bicv: need at least 4 rows and 4 columns, got " +
                    shape_str(n, p));
  }
  Rng row_rng(split_seed.sub(0));
  Rng col_rng(split_seed.sub(1));
  const auto row_perm = random_permutation(n, row_rng);
  const auto col_perm = random_permutation(p, col_rng);
  const std::vector<Index> r0(row_perm.begin(), row_perm.begin() + n / 2);
  const std::vector<Index> r1(row_perm.begin() + n / 2, row_perm.end());
  const std::vector<Index> c0(col_perm.begin(), col_perm.begin() + p / 2);
  const std::vector<Index> c1(col_perm.begin() + p / 2, col_perm.end());

  std::array<BlockSweep, 4> sweeps;
  for (int blk = 0; blk < 4; ++blk) {
    const auto& ra = (blk >> 1) ? r1 : r0;
    const auto& rd = (blk >> 1) ? r0 : r1;
    const auto& ca = (blk & 1) ? c1 : c0;
    const auto& cd = (blk & 1) ? c0 : c1;
    const Matrix a = submatrix(x, ra, ca);
    const Matrix b = submatrix(x, ra, cd);
    const Matrix c = submatrix(x, rd, ca);
    const Matrix d = submatrix(x, rd, cd);
    sweeps[static_cast<std::size_t>(blk)] = bicv_block_sweep(
        a, b, c, d, t_hi, cfg,
        split_seed.sub(10 + static_cast<std::uint64_t>(blk)),
        split_seed.sub(20 + static_cast<std::uint64_t>(blk)));
  }

  std::vector<BicvEntry> entries;
  entries.reserve(static_cast<std::size_t>(t_hi));
  for (int t = 1; t <= t_hi; ++t) {
    const auto i = static_cast<std::size_t>(t - 1);
    BicvEntry e;
    e.t = t;
    e.median_error = median4({sweeps[0].error[i], sweeps[1].error[i],
                              sweeps[2].error[i], sweeps[3].error[i]});
    e.d_hat = median4_low(
        {sweeps[0].d_hat[i], sweeps[1].d_hat[i], sweeps[2].d_hat[i],
         sweeps[3].d_hat[i]});
    e.collapsed = sweeps[0].collapsed || sweeps[1].collapsed ||
                  sweeps[2].collapsed || sweeps[3].collapsed;
    entries.push_back(e);
  }
  return entries;
}

}  // namespace

std::pair<double, int> bicv_error(const Matrix& x, int t,
                                  const ArsvdConfig& cfg, RngSeed split_seed) {
  cfg.validate();
  if (t < 1 || t > cfg.t_max) throw ConfigError("bicv: t out of range");
  const auto entries = bicv_sweep(x, t, cfg, split_seed);
  return {entries.back().median_error, entries.back().d_hat};
}

BicvReport select_t_and_d(const Matrix& x, const ArsvdConfig& cfg) {
  cfg.validate();
  BicvReport report;
  report.per_t = bicv_sweep(x, cfg.t_max, cfg, cfg.seed.sub(200));
  report.t_star = 1;
  double best = report.per_t.front().median_error;
  for (const auto& e : report.per_t) {
    if (e.median_error < best) {  // strict: ties resolve to the smaller t
      best = e.median_error;
      report.t_star = e.t;
    }
  }
  report.d_star = report.per_t[static_cast<std::size_t>(report.t_star - 1)].d_hat;
  return report;
}

SelectionReport select_full(const Matrix& x, const ArsvdConfig& cfg) {
  cfg.validate();
  SelectionReport report;
  const Index min_dim = std::min(x.rows(), x.cols());
  report.ell_clamped = cfg.d_max + cfg.delta > min_dim;
  const Index d_max_eff = std::min(cfg.d_max, min_dim);
  report.profiles = stability_profiles(x, cfg.t_max, d_max_eff,
                                       cfg.stability_projections,
                                       cfg.seed.sub(100));
  report.change_points.reserve(report.profiles.size());
  for (const auto& prof : report.profiles) {
    report.change_points.push_back(rank_changepoint(prof));
  }
  report.bicv = select_t_and_d(x, cfg);
  return report;
}

}  // namespace arsvd
