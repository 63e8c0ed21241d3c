#include "arsvd/lmm.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <thread>

#include "arsvd/linalg.hpp"

namespace arsvd {

double chisq1_sf(double x) {
  if (x < 0.0) throw ConfigError("chisq1_sf: negative statistic");
  const double p = std::erfc(std::sqrt(0.5 * x));
  return std::max(p, 1e-300);
}

GenotypeMatrix standardize(Matrix raw, std::vector<std::string> variant_ids) {
  const Index n = raw.rows(), p = raw.cols();
  if (n < 2) throw DataError("standardize: need at least 2 individuals");
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < p; ++j) {
      const double v = raw(i, j);
      if (v != 0.0 && v != 1.0 && v != 2.0) {
        throw DataError("standardize: entry (" + std::to_string(i) + ", " +
                        std::to_string(j) + ") = " + std::to_string(v) +
                        " not in {0, 1, 2}");
      }
    }
  }
  GenotypeMatrix g;
  if (variant_ids.empty()) {
    variant_ids.reserve(static_cast<std::size_t>(p));
    for (Index j = 0; j < p; ++j) {
      variant_ids.push_back("v" + std::to_string(j + 1));
    }
  } else if (static_cast<Index>(variant_ids.size()) != p) {
    throw DataError("standardize: " + std::to_string(variant_ids.size()) +
                    " variant ids for " + std::to_string(p) + " variants");
  }

  std::vector<Index> kept;
  for (Index j = 0; j < p; ++j) {
    const double mean = raw.col(j).mean();
    const double var = (raw.col(j).array() - mean).square().sum() /
                       static_cast<double>(n - 1);
    if (var > 0.0) {
      kept.push_back(j);
    } else {
      g.dropped_monomorphic.push_back(j);
    }
  }
  if (kept.empty()) throw DataError("standardize: all columns monomorphic");

  g.standardized.resize(n, static_cast<Index>(kept.size()));
  for (std::size_t c = 0; c < kept.size(); ++c) {
    const Index j = kept[c];
    const double mean = raw.col(j).mean();
    const double sd = std::sqrt((raw.col(j).array() - mean).square().sum() /
                                static_cast<double>(n - 1));
    g.standardized.col(static_cast<Index>(c)) = (raw.col(j).array() - mean) / sd;
  }
  g.raw = std::move(raw);
  g.variant_ids = std::move(variant_ids);
  g.kept = std::move(kept);
  return g;
}

GrmFactor grm_factor(const GenotypeMatrix& g, const ArsvdConfig& cfg,
                     const std::vector<Index>& exclude,
                     std::optional<Index> rank) {
  cfg.validate();
  const std::set<Index> excluded(exclude.begin(), exclude.end());
  std::vector<Index> cols;  // positions within standardized
  for (std::size_t c = 0; c < g.kept.size(); ++c) {
    if (!excluded.count(g.kept[c])) cols.push_back(static_cast<Index>(c));
  }
  if (cols.empty()) throw ConfigError("grm_factor: exclusion leaves no variants");

  Matrix design(g.standardized.rows(), static_cast<Index>(cols.size()));
  for (std::size_t c = 0; c < cols.size(); ++c) {
    design.col(static_cast<Index>(c)) = g.standardized.col(cols[c]);
  }

  GrmFactor k;
  k.p_used = design.cols();
  k.scaling = 1.0 / static_cast<double>(k.p_used);
  LowRankFactorization f;
  if (rank.has_value()) {
    f = arsvd_fixed(design, *rank, cfg.t_max, cfg);
    k.t_star = cfg.t_max;
  } else {
    AdaptiveResult ar = arsvd_adaptive(design, cfg);
    f = std::move(ar.factor);
    k.selection = std::move(ar.report);
    k.t_star = k.selection.t_star();
    k.adaptive = true;
  }
  k.u = std::move(f.u);
  k.lam = f.s.array().square() * k.scaling;
  k.d_star = f.rank;
  return k;
}

namespace {

struct RotatedGls {
  // Cross products needed to evaluate the profile likelihood at any delta
  // in O(d* q^2) after one O(n (d* + q)) setup.
  double yy = 0.0;
  Matrix ctc, c_rot;  // q x q, d* x q
  Vector cty, y_rot;  // q, d*
  Index n = 0, q = 0, d = 0;
};

RotatedGls rotate(const Vector& y, const Matrix& c, const GrmFactor& k) {
  RotatedGls r;
  r.n = y.size();
  r.q = c.cols();
  r.d = k.d_star;
  if (c.rows() != r.n) {
    throw DimensionError("fit_null: covariates " + shape_str(c.rows(), c.cols()) +
                         " vs response length " + std::to_string(r.n));
  }
  if (r.d > 0 && k.u.rows() != r.n) {
    throw DimensionError("fit_null: GRM factor rows " +
                         std::to_string(k.u.rows()) + " vs response length " +
                         std::to_string(r.n));
  }
  if (r.q < 1) throw ConfigError("fit_null: need at least an intercept column");
  if (qr_thin(Matrix(c)).rank_deficient) {
    throw ConfigError("fit_null: covariates are rank deficient");
  }
  r.yy = y.squaredNorm();
  r.ctc = c.transpose() * c;
  r.cty = c.transpose() * y;
  if (r.d > 0) {
    r.c_rot = k.u.transpose() * c;
    r.y_rot = k.u.transpose() * y;
  } else {
    r.c_rot.resize(0, r.q);
    r.y_rot.resize(0);
  }
  return r;
}

struct ProfilePoint {
  double loglik;
  double sigma_g2;
  Vector beta;
};

ProfilePoint profile_at(const RotatedGls& r, const Vector& lam, double delta,
                        FitMethod method) {
  const double w0 = 1.0 / delta;
  Vector dw(r.d);  // w_i - w0
  double logdet = static_cast<double>(r.n - r.d) * std::log(delta);
  for (Index i = 0; i < r.d; ++i) {
    const double e = lam[i] + delta;
    dw[i] = 1.0 / e - w0;
    logdet += std::log(e);
  }
  Matrix m = w0 * r.ctc;
  Vector rhs = w0 * r.cty;
  double qform = w0 * r.yy;
  if (r.d > 0) {
    m.noalias() += r.c_rot.transpose() * dw.asDiagonal() * r.c_rot;
    rhs.noalias() += r.c_rot.transpose() * (dw.asDiagonal() * r.y_rot);
    qform += r.y_rot.dot(dw.asDiagonal() * r.y_rot);
  }
  Eigen::LDLT<Matrix> ldlt(m);
  const Vector beta = ldlt.solve(rhs);
  const double rss = std::max(qform - beta.dot(rhs), 1e-300);

  const auto n = static_cast<double>(r.n);
  ProfilePoint pt;
  pt.beta = beta;
  if (method == FitMethod::kML) {
    pt.sigma_g2 = rss / n;
    pt.loglik = -0.5 * (n * std::log(2.0 * std::numbers::pi) +
                        n * std::log(pt.sigma_g2) + logdet + n);
  } else {
    const double nq = n - static_cast<double>(r.q);
    pt.sigma_g2 = rss / nq;
    double logdet_m = 0.0, logdet_ctc = 0.0;
    for (Index i = 0; i < r.q; ++i) {
      logdet_m += std::log(ldlt.vectorD()[i]);
    }
    Eigen::LDLT<Matrix> base(r.ctc);
    for (Index i = 0; i < r.q; ++i) logdet_ctc += std::log(base.vectorD()[i]);
    pt.loglik = -0.5 * (nq * (std::log(2.0 * std::numbers::pi) +
                              std::log(pt.sigma_g2) + 1.0) +
                        logdet + logdet_m - logdet_ctc);
  }
  return pt;
}

}  // namespace

VarianceComponents fit_null(const Vector& y, const Matrix& covariates,
                            const GrmFactor& k, FitMethod method) {
  const RotatedGls r = rotate(y, covariates, k);

  constexpr double kLo = 1e-5, kHi = 1e5;
  constexpr int kGrid = 100;
  const double log_lo = std::log(kLo), log_hi = std::log(kHi);

  auto eval = [&](double log_delta) {
    return profile_at(r, k.lam, std::exp(log_delta), method).loglik;
  };

  int best_i = 0;
  double best_ll = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < kGrid; ++i) {
    const double ld = log_lo + (log_hi - log_lo) * i / (kGrid - 1);
    const double ll = eval(ld);
    if (std::isfinite(ll) && ll > best_ll) {
      best_ll = ll;
      best_i = i;
    }
  }
  if (!std::isfinite(best_ll)) {
    throw NumericalError("fit_null: likelihood is non-finite everywhere");
  }

  const double step = (log_hi - log_lo) / (kGrid - 1);
  double lo = log_lo + step * std::max(best_i - 1, 0);
  double hi = log_lo + step * std::min(best_i + 1, kGrid - 1);
  // Golden-section refinement to 1e-6 in log delta.
  constexpr double kInvPhi = 0.6180339887498949;
  double x1 = hi - kInvPhi * (hi - lo);
  double x2 = lo + kInvPhi * (hi - lo);
  double f1 = eval(x1), f2 = eval(x2);
  while (hi - lo > 1e-6) {
    if (f1 >= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - kInvPhi * (hi - lo);
      f1 = eval(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + kInvPhi * (hi - lo);
      f2 = eval(x2);
    }
  }
  const double log_delta = 0.5 * (lo + hi);
  const double delta = std::exp(log_delta);
  const ProfilePoint pt = profile_at(r, k.lam, delta, method);

  VarianceComponents vc;
  vc.delta = delta;
  vc.sigma_g2 = pt.sigma_g2;
  vc.sigma_e2 = delta * pt.sigma_g2;
  vc.loglik = pt.loglik;
  vc.method = method;
  vc.boundary = best_i == 0 || best_i == kGrid - 1;
  return vc;
}

namespace {

void parallel_for(Index count, int threads, const std::function<void(Index, Index)>& body) {
  if (threads <= 1 || count < 256) {
    body(0, count);
    return;
  }
  const int workers = std::min<int>(threads, 16);
  std::vector<std::thread> pool;
  const Index chunk = (count + workers - 1) / workers;
  for (int w = 0; w < workers; ++w) {
    const Index lo = w * chunk;
    const Index hi = std::min(count, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back(body, lo, hi);
  }
  for (auto& th : pool) th.join();
}

AssocResult finalize_scan(const GenotypeMatrix& g, const Vector& num,
                          const Vector& den, double stat_scale, int threads) {
  const Index p = g.p();
  AssocResult res;
  res.variant_id = g.variant_ids;
  res.beta = Vector::Zero(p);
  res.se = Vector::Zero(p);
  res.stat = Vector::Zero(p);
  res.p = Vector::Ones(p);
  res.flagged.assign(static_cast<std::size_t>(p), 0);
  for (Index j : g.dropped_monomorphic) {
    res.flagged[static_cast<std::size_t>(j)] = 1;
    res.se[j] = std::numeric_limits<double>::infinity();
  }
  const double den_floor = 1e-12 * std::max(den.maxCoeff(), 0.0);
  parallel_for(static_cast<Index>(g.kept.size()), threads, [&](Index lo, Index hi) {
    for (Index c = lo; c < hi; ++c) {
      const Index j = g.kept[static_cast<std::size_t>(c)];
      if (!(den[c] > den_floor) || !(den[c] > 0.0)) {
        res.flagged[static_cast<std::size_t>(j)] = 1;
        res.se[j] = std::numeric_limits<double>::infinity();
        continue;
      }
      res.beta[j] = num[c] / den[c];
      res.se[j] = std::sqrt(stat_scale / den[c]);
      res.stat[j] = num[c] * num[c] / (stat_scale * den[c]);
      res.p[j] = chisq1_sf(res.stat[j]);
    }
  });
  return res;
}

}  // namespace

AssocResult assoc_scan(const GenotypeMatrix& g, const Vector& y,
                       const Matrix& covariates, const VarianceComponents& vc,
                       const GrmFactor& k, int threads) {
  const Index n = y.size();
  if (g.standardized.rows() != n || covariates.rows() != n) {
    throw DimensionError("assoc_scan: genotypes " +
                         shape_str(g.standardized.rows(), g.standardized.cols()) +
                         " / covariates " +
                         shape_str(covariates.rows(), covariates.cols()) +
                         " vs response length " + std::to_string(n));
  }
  if (!(vc.sigma_e2 > 0.0)) throw ConfigError("assoc_scan: sigma_e2 must be > 0");

  // V = sigma_g^2 U diag(lam) U^T + sigma_e^2 I. Eigen-coordinates give
  // V^-1 a = w0 a + U ((w - w0) .* U^T a), O(n d*) per vector.
  const Index d = k.d_star;
  const double w0 = 1.0 / vc.sigma_e2;
  Vector dw(d);
  for (Index i = 0; i < d; ++i) {
    dw[i] = 1.0 / (vc.sigma_g2 * k.lam[i] + vc.sigma_e2) - w0;
  }
  const auto vinv_apply = [&](const Matrix& a) {
    Matrix out = w0 * a;
    if (d > 0) out.noalias() += k.u * (dw.asDiagonal() * (k.u.transpose() * a));
    return out;
  };

  const Matrix vc_cov = vinv_apply(covariates);           // n x q
  const Matrix h = covariates.transpose() * vc_cov;       // q x q
  Eigen::LDLT<Matrix> hldlt(h);
  const Vector vy = vinv_apply(y);
  const Vector py = vy - vc_cov * hldlt.solve(covariates.transpose() * vy);

  const Matrix& design = g.standardized;  // n x pk
  const Vector num = design.transpose() * py;
  Vector xvx = w0 * design.colwise().squaredNorm().transpose();
  Matrix s = vc_cov.transpose() * design;  // q x pk
  if (d > 0) {
    const Matrix t = k.u.transpose() * design;  // d x pk
    xvx += (dw.asDiagonal() * t.cwiseProduct(t)).colwise().sum().transpose();
  }
  const Matrix hs = hldlt.solve(s);
  const Vector den = xvx - s.cwiseProduct(hs).colwise().sum().transpose();

  return finalize_scan(g, num, den, 1.0, threads);
}

AssocResult naive_scan(const GenotypeMatrix& g, const Vector& y,
                       const Matrix& covariates, int threads) {
  const Index n = y.size();
  if (g.standardized.rows() != n || covariates.rows() != n) {
    throw DimensionError("naive_scan: genotypes " +
                         shape_str(g.standardized.rows(), g.standardized.cols()) +
                         " / covariates " +
                         shape_str(covariates.rows(), covariates.cols()) +
                         " vs response length " + std::to_string(n));
  }
  const QrFactors qc = qr_thin(covariates);
  if (qc.rank_deficient) throw ConfigError("naive_scan: covariates rank deficient");
  const Vector resid = y - qc.q * (qc.q.transpose() * y);
  const double sigma2 = resid.squaredNorm() / static_cast<double>(n);
  if (!(sigma2 > 0.0)) throw NumericalError("naive_scan: response in covariate span");

  const Matrix& design = g.standardized;
  const Matrix proj = qc.q.transpose() * design;  // q x pk
  const Vector num = design.transpose() * resid;
  const Vector den = design.colwise().squaredNorm().transpose() -
                     proj.colwise().squaredNorm().transpose();
  return finalize_scan(g, num, den, sigma2, threads);
}

}  // namespace arsvd
