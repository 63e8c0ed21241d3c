#include "arsvd/simgen.hpp"

#include <cmath>

#include "arsvd/linalg.hpp"

namespace arsvd {

double top_singular_value(const Matrix& a, int iters, Index block,
                          RngSeed seed) {
  const Index l = std::min(block, std::min(a.rows(), a.cols()));
  Matrix q = qr_thin(gaussian_matrix(a.rows(), l, seed)).q;
  for (int i = 0; i < iters; ++i) {
    q = qr_thin(Matrix(a.transpose() * q)).q;
    q = qr_thin(Matrix(a * q)).q;
  }
  // Rayleigh-Ritz on the converged block.
  SvdFactors f = svd_exact(Matrix(a.transpose() * q));
  return f.s[0];
}

LowRankSim sim_lowrank(const LowRankSimConfig& cfg) {
  if (cfg.n < 1 || cfg.p < 1) throw ConfigError("sim_lowrank: empty shape");
  if (cfg.d_star < 1 || cfg.d_star > std::min(cfg.n, cfg.p)) {
    throw ConfigError("sim_lowrank: d_star must be in [1, min(n, p)]");
  }
  if (!(cfg.kappa > 0.0)) throw ConfigError("sim_lowrank: kappa must be > 0");

  const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(cfg.n));

  // Noise baseline measured from an actual draw of the configured size.
  const Matrix probe =
      gaussian_matrix(cfg.n, cfg.p, cfg.seed.sub(4)) * inv_sqrt_n;
  const double s1e = top_singular_value(probe, 25, 8, cfg.seed.sub(5));

  // Uniform Stiefel frames: QR of a Gaussian matrix with sign-fixed R.
  LowRankSim sim;
  sim.truth.u = qr_thin(gaussian_matrix(cfg.n, cfg.d_star, cfg.seed.sub(0))).q;
  sim.truth.v = qr_thin(gaussian_matrix(cfg.p, cfg.d_star, cfg.seed.sub(1))).q;
  sim.truth.noise_top_sv = s1e;

  // Ascending construction from the baseline, reported in decreasing order.
  Vector s_asc(cfg.d_star);
  Rng inc_rng(cfg.seed.sub(2));
  s_asc[0] = cfg.kappa * s1e;
  for (Index j = 1; j < cfg.d_star; ++j) {
    s_asc[j] = s_asc[j - 1] + inc_rng.exponential();
  }
  sim.truth.s = s_asc.reverse();
  sim.truth.u = sim.truth.u.rowwise().reverse().eval();
  sim.truth.v = sim.truth.v.rowwise().reverse().eval();

  sim.x = gaussian_matrix(cfg.n, cfg.p, cfg.seed.sub(3)) * inv_sqrt_n;
  sim.x.noalias() +=
      sim.truth.u * sim.truth.s.asDiagonal() * sim.truth.v.transpose();
  return sim;
}

namespace {

// Symmetric Dirichlet in log space so tiny concentrations cannot underflow
// the normalization.
Vector dirichlet_symmetric(double alpha, int k, Rng& rng) {
  Vector logs(k);
  for (int i = 0; i < k; ++i) {
    if (alpha < 1.0) {
      const double g = rng.gamma(alpha + 1.0);
      logs[i] = std::log(g) + std::log(rng.uniform_pos()) / alpha;
    } else {
      logs[i] = std::log(rng.gamma(alpha));
    }
  }
  const double m = logs.maxCoeff();
  Vector w = (logs.array() - m).exp();
  return w / w.sum();
}

}  // namespace

AdmixtureSim sim_admixture(const AdmixSimConfig& cfg) {
  if (cfg.n < 1 || cfg.p < 1) throw ConfigError("sim_admixture: empty shape");
  if (cfg.n_pops < 2) throw ConfigError("sim_admixture: need >= 2 populations");
  if (!(cfg.alpha > 0.0)) throw ConfigError("sim_admixture: alpha must be > 0");
  if (cfg.pheno_pop < 0 || cfg.pheno_pop >= cfg.n_pops) {
    throw ConfigError("sim_admixture: pheno_pop out of range");
  }

  AdmixtureSim sim;
  const int k = cfg.n_pops;
  Rng base_rng(cfg.seed.sub(0));

  sim.truth.theta.resize(cfg.n, k);
  for (Index i = 0; i < cfg.n; ++i) {
    sim.truth.theta.row(i) = dirichlet_symmetric(cfg.alpha, k, base_rng).transpose();
  }
  sim.truth.phi.resize(cfg.p, k);
  for (Index j = 0; j < cfg.p; ++j) {
    for (int c = 0; c < k; ++c) sim.truth.phi(j, c) = base_rng.uniform01();
  }

  // Column j uses sub-stream j + 1; stream 0 is theta/phi/phenotype.
  sim.genotypes.resize(cfg.n, cfg.p);
  for (Index j = 0; j < cfg.p; ++j) {
    Rng col_rng(cfg.seed.sub(static_cast<std::uint64_t>(j) + 1));
    for (Index i = 0; i < cfg.n; ++i) {
      const Vector theta_i = sim.truth.theta.row(i).transpose();
      double g = 0.0;
      for (int copy = 0; copy < 2; ++copy) {
        const Index z = col_rng.categorical(theta_i);
        if (col_rng.bernoulli(sim.truth.phi(j, z))) g += 1.0;
      }
      sim.genotypes(i, j) = g;
    }
  }

  sim.phenotype.resize(cfg.n);
  for (Index i = 0; i < cfg.n; ++i) {
    const double t = sim.truth.theta(i, cfg.pheno_pop);
    sim.phenotype[i] = base_rng.bernoulli(0.5 * t + 0.1 * (1.0 - t)) ? 1.0 : 0.0;
  }
  return sim;
}

}  // namespace arsvd
