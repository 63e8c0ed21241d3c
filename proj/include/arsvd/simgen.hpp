#pragma once

#include <vector>

#include "arsvd/rng.hpp"
#include "arsvd/types.hpp"

namespace arsvd {

struct LowRankSimConfig {
  Index n = 0;
  Index p = 0;
  Index d_star = 0;    // true rank
  double kappa = 1.0;  // signal-to-noise
  RngSeed seed;
};

struct LowRankTruth {
  Matrix u;  // n x d*, orthonormal
  Vector s;  // d* values, decreasing
  Matrix v;  // p x d*, orthonormal
  double noise_top_sv = 0.0;  // measured top singular value of a fresh noise draw
};

struct LowRankSim {
  Matrix x;
  LowRankTruth truth;
};

/// Signal-plus-noise matrix: X = U S V^T + E with E_ij ~ N(0, 1/n).
/// U, V are uniform Stiefel frames (QR of a Gaussian matrix with
/// sign-fixed R diagonal). The singular values start at kappa times the
/// top singular value of a separately drawn noise matrix and grow by iid
/// Exp(1) increments; they are reported in decreasing order.
LowRankSim sim_lowrank(const LowRankSimConfig& cfg);

struct AdmixSimConfig {
  Index n = 0;   // individuals
  Index p = 0;   // variants
  int n_pops = 2;
  double alpha = 1.0;  // symmetric Dirichlet concentration
  RngSeed seed;
  int pheno_pop = 0;  // population whose ancestry drives the phenotype
};

struct AdmixtureTruth {
  Matrix theta;  // n x K admixture proportions, rows sum to 1
  Matrix phi;    // p x K allele frequencies in [0, 1]
};

struct AdmixtureSim {
  Matrix genotypes;  // n x p, entries in {0, 1, 2}
  Vector phenotype;  // n, binary
  AdmixtureTruth truth;
};

/// Null-association admixture simulator: theta_i ~ Dir_K(alpha),
/// phi_jk ~ Beta(1,1); each of the two allele copies picks a population
/// z ~ Mult(theta_i) and is Bernoulli(phi_{j,z}); the phenotype is
/// Bern(0.5 theta_ik + 0.1 (1 - theta_ik)) so it depends on ancestry only.
/// Column j draws from sub-stream j+1, so per-column generation could be
/// parallelized without changing output.
AdmixtureSim sim_admixture(const AdmixSimConfig& cfg);

/// Top singular value of a matrix by block power iteration (used for the
/// noise baseline; accuracy ~0.5% at the default depth, plenty for a
/// simulation scale factor).
double top_singular_value(const Matrix& a, int iters = 25, Index block = 8,
                          RngSeed seed = {0xb10c, 0});

}  // namespace arsvd
