#include "arsvd/factor.hpp"

#include <cmath>

#include "arsvd/select.hpp"

namespace arsvd {

void ArsvdConfig::validate() const {
  if (d_max < 1) throw ConfigError("arsvd: d_max must be >= 1");
  if (t_max < 1) throw ConfigError("arsvd: t_max must be >= 1");
  if (delta < 0) throw ConfigError("arsvd: delta must be >= 0");
}

Index ArsvdConfig::working_width(Index rows, Index cols) const {
  return std::min(d_max + delta, std::min(rows, cols));
}

PowerChain::PowerChain(const Matrix& x, Index width, RngSeed seed, bool track_r)
    : x_(x), track_r_(track_r) {
  const Matrix omega = gaussian_matrix(x.rows(), width, seed);
  degenerate_ = (x.cwiseAbs().maxCoeff() == 0.0);
  QrFactors qr = qr_thin(omega);
  q_ = std::move(qr.q);
  if (track_r_) r_total_ = std::move(qr.r);
}

void PowerChain::step() {
  ++t_;
  if (degenerate_) return;  // zero input: every block is the QR of Omega
  QrFactors h = qr_thin(Matrix(x_.transpose() * q_));  // p x l
  QrFactors g = qr_thin(Matrix(x_ * h.q));             // n x l
  if (track_r_) {
    r_total_ = g.r * (h.r * r_total_);
    // Scalar rescaling keeps the accumulated product inside double range
    // without touching its singular vectors.
    const double m = r_total_.cwiseAbs().maxCoeff();
    if (m > 0.0) r_total_ /= m;
  }
  q_ = std::move(g.q);
}

Matrix PowerChain::left_singular_vectors() const {
  if (!track_r_) throw ConfigError("PowerChain: R tracking was not enabled");
  SvdFactors f = svd_exact(r_total_);
  return q_ * f.u;
}

std::vector<PowerBlock> power_blocks(const Matrix& x, const ArsvdConfig& cfg) {
  cfg.validate();
  if (!x.allFinite()) throw DataError("power_blocks: non-finite entries");
  const Index l = cfg.working_width(x.rows(), x.cols());
  PowerChain chain(x, l, cfg.seed);
  std::vector<PowerBlock> blocks;
  blocks.reserve(static_cast<std::size_t>(cfg.t_max));
  for (int t = 1; t <= cfg.t_max; ++t) {
    chain.step();
    blocks.push_back({t, chain.basis(), chain.degenerate()});
  }
  return blocks;
}

LowRankFactorization arsvd_stage2(const Matrix& x, const Matrix& basis,
                                  Index d, int t) {
  if (d < 1 || d > basis.cols()) {
    throw ConfigError("arsvd: rank " + std::to_string(d) +
                      " outside working width " + std::to_string(basis.cols()));
  }
  // Project onto the range basis and take the small exact SVD:
  // B = X^T Q = Ub S W^T, so X ~ Q B^T = (Q W) S Ub^T.
  const Matrix b = x.transpose() * basis;  // p x l
  SvdFactors f = svd_exact(b);

  LowRankFactorization out;
  out.u = basis * f.v.leftCols(d);  // n x d
  out.s = f.s.head(d);
  out.v = f.u.leftCols(d);  // p x d
  out.rank = d;
  out.iterations = t;

  // Sign convention: largest-magnitude entry of each u column positive.
  for (Index k = 0; k < d; ++k) {
    Index imax = 0;
    out.u.col(k).cwiseAbs().maxCoeff(&imax);
    if (out.u(imax, k) < 0.0) {
      out.u.col(k) = -out.u.col(k);
      out.v.col(k) = -out.v.col(k);
    }
  }
  return out;
}

LowRankFactorization arsvd_fixed(const Matrix& x, Index d, int t,
                                 const ArsvdConfig& cfg) {
  cfg.validate();
  if (t < 1 || t > cfg.t_max) {
    throw ConfigError("arsvd: t = " + std::to_string(t) + " outside 1.." +
                      std::to_string(cfg.t_max));
  }
  const Index l = cfg.working_width(x.rows(), x.cols());
  if (d < 1 || d > l) {
    throw ConfigError("arsvd: rank " + std::to_string(d) +
                      " outside working width " + std::to_string(l));
  }
  PowerChain chain(x, l, cfg.seed);
  for (int i = 1; i <= t; ++i) chain.step();
  return arsvd_stage2(x, chain.basis(), d, t);
}

AdaptiveResult arsvd_adaptive(const Matrix& x, const ArsvdConfig& cfg) {
  cfg.validate();
  if (!x.allFinite()) throw DataError("arsvd: non-finite entries");
  AdaptiveResult res;
  if (x.size() == 0 || x.cwiseAbs().maxCoeff() == 0.0) {
    res.report.degenerate_input = true;
    res.report.bicv.t_star = 1;
    res.report.bicv.d_star = 0;
    res.factor = LowRankFactorization{};
    return res;
  }
  res.report = select_full(x, cfg);
  res.factor = arsvd_fixed(x, res.report.d_star(), res.report.t_star(), cfg);
  return res;
}

}  // namespace arsvd
