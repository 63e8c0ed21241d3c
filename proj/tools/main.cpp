// arsvd: randomized low-rank factorization toolkit.
//
// Subcommands: svd, pca, sim (lowrank | admixture), assoc, bench.
// All outputs are TSV/CSV plus a JSON manifest; every command honors
// --seed end to end. Exit codes: 0 ok, 2 usage, 3 data error,
// 4 numerical failure.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "arsvd/factor.hpp"
#include "arsvd/geneig.hpp"
#include "arsvd/io.hpp"
#include "arsvd/lmm.hpp"
#include "arsvd/select.hpp"
#include "arsvd/simgen.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

constexpr const char* kVersion = "0.1.0";

struct CommonOpts {
  std::string out;
  std::uint64_t seed = 1;
  std::uint64_t stream = 0;
  int threads = 1;

  [[nodiscard]] arsvd::RngSeed rng() const { return {seed, stream}; }
};

struct FactorOpts {
  arsvd::Index d_max = 50;
  int t_max = 10;
  arsvd::Index delta = 10;
  bool adaptive = false;
  std::optional<arsvd::Index> rank;
  std::optional<int> t;

  [[nodiscard]] arsvd::ArsvdConfig config(arsvd::RngSeed seed) const {
    arsvd::ArsvdConfig cfg;
    cfg.d_max = d_max;
    cfg.t_max = t_max;
    cfg.delta = delta;
    cfg.seed = seed;
    return cfg;
  }
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--out", opts.out, "Output directory")->required();
  cmd->add_option("--seed", opts.seed, "RNG seed");
  cmd->add_option("--stream", opts.stream, "RNG sub-stream id");
  int env_threads = 1;
  if (const char* env = std::getenv("ARSVD_THREADS")) {
    env_threads = std::max(1, std::atoi(env));
  }
  opts.threads = env_threads;
  cmd->add_option("--threads", opts.threads, "Worker cap (default ARSVD_THREADS or 1)");
}

void add_factor_opts(CLI::App* cmd, FactorOpts& opts) {
  cmd->add_option("--d-max", opts.d_max, "Rank upper bound");
  cmd->add_option("--t-max", opts.t_max, "Max power iterations");
  cmd->add_option("--delta", opts.delta, "Oversampling");
  auto* adaptive = cmd->add_flag("--adaptive", opts.adaptive,
                                 "Data-driven (t*, d*) selection (default)");
  auto* rank = cmd->add_option("--rank", opts.rank, "Fixed rank (skip selection)");
  cmd->add_option("--t", opts.t, "Fixed iteration count (with --rank)")
      ->excludes(adaptive);
  rank->excludes(adaptive);
  adaptive->excludes(rank);
}

class Manifest {
 public:
  Manifest(std::string command, const CommonOpts& common) {
    doc_["command"] = std::move(command);
    doc_["seed"] = {{"seed", common.seed}, {"stream", common.stream}};
    doc_["threads"] = common.threads;
    doc_["versions"] = {{"arsvd", kVersion},
                        {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." +
                                      std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                      std::to_string(EIGEN_MINOR_VERSION)}};
    doc_["config"] = json::object();
    doc_["wall_time_sec"] = json::object();
    doc_["error"] = nullptr;
    start_ = std::chrono::steady_clock::now();
  }

  json& config() { return doc_["config"]; }
  json& doc() { return doc_; }

  template <typename F>
  auto stage(const std::string& name, F&& f) {
    const auto t0 = std::chrono::steady_clock::now();
    if constexpr (std::is_void_v<decltype(f())>) {
      f();
      doc_["wall_time_sec"][name] = seconds_since(t0);
    } else {
      auto result = f();
      doc_["wall_time_sec"][name] = seconds_since(t0);
      return result;
    }
  }

  void set_error(const std::string& msg) { doc_["error"] = msg; }

  void write(const fs::path& dir) {
    doc_["wall_time_sec"]["total"] = seconds_since(start_);
    std::ofstream out(dir / "manifest.json");
    out << doc_.dump(2) << '\n';
  }

 private:
  static double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
        .count();
  }
  json doc_;
  std::chrono::steady_clock::time_point start_;
};

json selection_to_json(const arsvd::SelectionReport& rep) {
  json out;
  out["t_star"] = rep.t_star();
  out["d_star"] = rep.d_star();
  out["ell_clamped"] = rep.ell_clamped;
  out["degenerate_input"] = rep.degenerate_input;
  out["bicv_per_t"] = json::array();
  for (const auto& e : rep.bicv.per_t) {
    out["bicv_per_t"].push_back({{"t", e.t},
                                 {"median_error", e.median_error},
                                 {"d_hat", e.d_hat},
                                 {"collapsed", e.collapsed}});
  }
  out["stability_per_t"] = json::array();
  for (std::size_t i = 0; i < rep.profiles.size(); ++i) {
    const auto& prof = rep.profiles[i];
    json entry = {{"t", prof.t}, {"degenerate", prof.degenerate}};
    if (i < rep.change_points.size()) {
      const auto& cp = rep.change_points[i];
      entry["d_hat"] = cp.d_hat;
      entry["min_p"] = cp.min_p;
      entry["weak"] = cp.weak;
    }
    entry["scores"] = std::vector<double>(
        prof.scores.data(), prof.scores.data() + prof.scores.size());
    out["stability_per_t"].push_back(entry);
  }
  return out;
}

fs::path ensure_out_dir(const std::string& out) {
  fs::path dir(out);
  fs::create_directories(dir);
  return dir;
}

// ---------------------------------------------------------------- svd / pca

int run_svd(const CommonOpts& common, const FactorOpts& fopts,
            const std::string& input, bool as_pca) {
  const fs::path dir = ensure_out_dir(common.out);
  Manifest manifest(as_pca ? "pca" : "svd", common);
  manifest.config() = {{"input", input},
                       {"d_max", fopts.d_max},
                       {"t_max", fopts.t_max},
                       {"delta", fopts.delta},
                       {"mode", fopts.rank ? "fixed" : "adaptive"}};
  if (fopts.rank) manifest.config()["rank"] = *fopts.rank;
  if (fopts.t) manifest.config()["t"] = *fopts.t;

  try {
    const arsvd::Matrix x =
        manifest.stage("load", [&] { return arsvd::read_matrix_tsv(input); });
    const arsvd::ArsvdConfig cfg = fopts.config(common.rng());
    json report;

    if (as_pca) {
      std::optional<arsvd::Index> rank = fopts.rank;
      arsvd::PcaResult res = manifest.stage("factor", [&] {
        return arsvd::pca(x, cfg, rank);
      });
      manifest.stage("write", [&] {
        arsvd::write_matrix_tsv((dir / "components.tsv").string(), res.components);
        arsvd::write_matrix_tsv((dir / "scores.tsv").string(), res.scores);
        arsvd::write_vector_tsv((dir / "explained_variance.tsv").string(),
                                res.explained_variance);
        arsvd::write_vector_tsv((dir / "center.tsv").string(), res.centering);
      });
      report["mode"] = res.adaptive ? "adaptive" : "fixed";
      report["n_components"] = res.components.cols();
      report["constant_columns"] = res.constant_columns;
      if (res.adaptive) report["selection"] = selection_to_json(res.selection);
      manifest.doc()["selection"] =
          res.adaptive ? selection_to_json(res.selection) : json(nullptr);
    } else {
      arsvd::LowRankFactorization f;
      json selection(nullptr);
      if (fopts.rank) {
        const int t = fopts.t.value_or(cfg.t_max);
        f = manifest.stage("factor", [&] {
          return arsvd::arsvd_fixed(x, *fopts.rank, t, cfg);
        });
        report["mode"] = "fixed";
      } else {
        arsvd::AdaptiveResult res = manifest.stage("factor", [&] {
          return arsvd::arsvd_adaptive(x, cfg);
        });
        f = std::move(res.factor);
        selection = selection_to_json(res.report);
        report["mode"] = "adaptive";
        report["selection"] = selection;
      }
      report["rank"] = f.rank;
      report["iterations"] = f.iterations;
      manifest.stage("write", [&] {
        arsvd::write_matrix_tsv((dir / "U.tsv").string(), f.u);
        arsvd::write_vector_tsv((dir / "S.tsv").string(), f.s);
        arsvd::write_matrix_tsv((dir / "V.tsv").string(), f.v);
      });
      manifest.doc()["selection"] = selection;
    }

    std::ofstream rep_out(dir / "report.json");
    rep_out << report.dump(2) << '\n';
    manifest.write(dir);
  } catch (const std::exception& e) {
    manifest.set_error(e.what());
    manifest.write(dir);
    throw;
  }
  return 0;
}

// ----------------------------------------------------------------------- sim

int run_sim_lowrank(const CommonOpts& common, arsvd::Index n, arsvd::Index p,
                    arsvd::Index rank, double kappa) {
  const fs::path dir = ensure_out_dir(common.out);
  Manifest manifest("sim lowrank", common);
  manifest.config() = {{"n", n}, {"p", p}, {"rank", rank}, {"kappa", kappa}};
  try {
    arsvd::LowRankSimConfig cfg{n, p, rank, kappa, common.rng()};
    const arsvd::LowRankSim sim =
        manifest.stage("simulate", [&] { return arsvd::sim_lowrank(cfg); });
    manifest.stage("write", [&] {
      arsvd::write_matrix_tsv((dir / "X.tsv").string(), sim.x);
      arsvd::write_matrix_tsv((dir / "truth_U.tsv").string(), sim.truth.u);
      arsvd::write_vector_tsv((dir / "truth_S.tsv").string(), sim.truth.s);
      arsvd::write_matrix_tsv((dir / "truth_V.tsv").string(), sim.truth.v);
    });
    manifest.doc()["noise_top_sv"] = sim.truth.noise_top_sv;
    manifest.write(dir);
  } catch (const std::exception& e) {
    manifest.set_error(e.what());
    manifest.write(dir);
    throw;
  }
  return 0;
}

int run_sim_admixture(const CommonOpts& common, arsvd::Index n, arsvd::Index p,
                      int pops, double alpha, int pheno_pop) {
  const fs::path dir = ensure_out_dir(common.out);
  Manifest manifest("sim admixture", common);
  manifest.config() = {{"n", n},
                       {"p", p},
                       {"pops", pops},
                       {"alpha", alpha},
                       {"pheno_pop", pheno_pop}};
  try {
    arsvd::AdmixSimConfig cfg{n, p, pops, alpha, common.rng(), pheno_pop};
    const arsvd::AdmixtureSim sim =
        manifest.stage("simulate", [&] { return arsvd::sim_admixture(cfg); });
    manifest.stage("write", [&] {
      std::vector<std::string> ids;
      ids.reserve(static_cast<std::size_t>(p));
      for (arsvd::Index j = 0; j < p; ++j) ids.push_back("v" + std::to_string(j + 1));
      arsvd::write_genotypes_tsv((dir / "genotypes.tsv").string(), sim.genotypes, ids);
      arsvd::write_vector_tsv((dir / "phenotype.tsv").string(), sim.phenotype);
      arsvd::write_matrix_tsv((dir / "theta.tsv").string(), sim.truth.theta);
      arsvd::write_matrix_tsv((dir / "phi.tsv").string(), sim.truth.phi);
    });
    manifest.write(dir);
  } catch (const std::exception& e) {
    manifest.set_error(e.what());
    manifest.write(dir);
    throw;
  }
  return 0;
}

// --------------------------------------------------------------------- assoc

struct AssocFiles {
  std::string genotypes;
  std::string phenotype;
  std::string covariates;
  std::string groups;
  bool naive = false;
};

json vc_to_json(const arsvd::VarianceComponents& vc) {
  return {{"sigma_g2", vc.sigma_g2}, {"sigma_e2", vc.sigma_e2},
          {"delta", vc.delta},       {"loglik", vc.loglik},
          {"method", vc.method == arsvd::FitMethod::kML ? "ML" : "REML"},
          {"boundary", vc.boundary}};
}

int run_assoc(const CommonOpts& common, const FactorOpts& fopts,
              const AssocFiles& files) {
  const fs::path dir = ensure_out_dir(common.out);
  Manifest manifest("assoc", common);
  manifest.config() = {{"genotypes", files.genotypes},
                       {"phenotype", files.phenotype},
                       {"covariates", files.covariates},
                       {"groups", files.groups},
                       {"naive", files.naive},
                       {"d_max", fopts.d_max},
                       {"t_max", fopts.t_max},
                       {"delta", fopts.delta},
                       {"mode", fopts.rank ? "fixed" : "adaptive"}};
  if (fopts.rank) manifest.config()["rank"] = *fopts.rank;

  try {
    auto [raw, ids] = manifest.stage("load", [&] {
      return arsvd::read_genotypes_tsv(files.genotypes);
    });
    const arsvd::Vector y = arsvd::read_vector_tsv(files.phenotype);
    if (y.size() != raw.rows()) {
      throw arsvd::DimensionError(
          "assoc: " + files.phenotype + " has " + std::to_string(y.size()) +
          " values but " + files.genotypes + " has " +
          std::to_string(raw.rows()) + " individuals");
    }
    arsvd::Matrix covariates = arsvd::Matrix::Ones(raw.rows(), 1);
    if (!files.covariates.empty()) {
      const arsvd::Matrix user = arsvd::read_matrix_tsv(files.covariates);
      if (user.rows() != raw.rows()) {
        throw arsvd::DimensionError(
            "assoc: " + files.covariates + " has " + std::to_string(user.rows()) +
            " rows but " + files.genotypes + " has " +
            std::to_string(raw.rows()) + " individuals");
      }
      covariates.conservativeResize(Eigen::NoChange, 1 + user.cols());
      covariates.rightCols(user.cols()) = user;
    }

    const arsvd::GenotypeMatrix g = manifest.stage("standardize", [&] {
      return arsvd::standardize(std::move(raw), std::move(ids));
    });
    const arsvd::ArsvdConfig cfg = fopts.config(common.rng());

    arsvd::AssocResult result;
    if (files.naive) {
      result = manifest.stage("scan", [&] {
        return arsvd::naive_scan(g, y, covariates, common.threads);
      });
      manifest.doc()["selection"] = nullptr;
    } else if (files.groups.empty()) {
      const arsvd::GrmFactor k = manifest.stage("grm", [&] {
        return arsvd::grm_factor(g, cfg, {}, fopts.rank);
      });
      const arsvd::VarianceComponents vc =
          manifest.stage("fit_null", [&] { return arsvd::fit_null(y, covariates, k); });
      result = manifest.stage("scan", [&] {
        return arsvd::assoc_scan(g, y, covariates, vc, k, common.threads);
      });
      manifest.doc()["variance_components"] = vc_to_json(vc);
      manifest.doc()["d_star"] = k.d_star;
      manifest.doc()["t_star"] = k.t_star;
      manifest.doc()["selection"] =
          k.adaptive ? selection_to_json(k.selection) : json(nullptr);
    } else {
      // Leave-group-out: for each group, the relatedness factor is built
      // from all other groups and only that group's variants are scanned.
      const auto pairs = arsvd::read_groups_tsv(files.groups);
      std::map<std::string, arsvd::Index> index_of;
      for (std::size_t j = 0; j < g.variant_ids.size(); ++j) {
        index_of[g.variant_ids[j]] = static_cast<arsvd::Index>(j);
      }
      std::map<std::string, std::vector<arsvd::Index>> members;
      std::vector<std::string> group_order;
      for (const auto& [vid, grp] : pairs) {
        const auto it = index_of.find(vid);
        if (it == index_of.end()) {
          throw arsvd::DataError("assoc: group file names unknown variant '" +
                                 vid + "'");
        }
        if (!members.count(grp)) group_order.push_back(grp);
        members[grp].push_back(it->second);
      }
      for (const auto& [vid, idx] : index_of) {
        bool found = false;
        for (const auto& [grp, list] : members) {
          for (arsvd::Index m : list) found = found || m == idx;
        }
        if (!found) {
          throw arsvd::DataError("assoc: variant '" + vid +
                                 "' missing from group file");
        }
      }

      result.variant_id = g.variant_ids;
      const arsvd::Index p = g.p();
      result.beta = arsvd::Vector::Zero(p);
      result.se = arsvd::Vector::Zero(p);
      result.stat = arsvd::Vector::Zero(p);
      result.p = arsvd::Vector::Ones(p);
      result.flagged.assign(static_cast<std::size_t>(p), 0);
      manifest.doc()["groups"] = json::array();
      manifest.stage("scan", [&] {
        for (const auto& grp : group_order) {
          const auto& held_out = members.at(grp);
          const arsvd::GrmFactor k = arsvd::grm_factor(g, cfg, held_out, fopts.rank);
          const arsvd::VarianceComponents vc = arsvd::fit_null(y, covariates, k);
          const arsvd::AssocResult part =
              arsvd::assoc_scan(g, y, covariates, vc, k, common.threads);
          for (arsvd::Index j : held_out) {
            result.beta[j] = part.beta[j];
            result.se[j] = part.se[j];
            result.stat[j] = part.stat[j];
            result.p[j] = part.p[j];
            result.flagged[static_cast<std::size_t>(j)] =
                part.flagged[static_cast<std::size_t>(j)];
          }
          manifest.doc()["groups"].push_back({{"group", grp},
                                              {"n_variants", held_out.size()},
                                              {"d_star", k.d_star},
                                              {"t_star", k.t_star},
                                              {"vc", vc_to_json(vc)}});
        }
      });
    }

    manifest.stage("write", [&] {
      arsvd::write_assoc_tsv((dir / "assoc.tsv").string(), result);
    });
    manifest.write(dir);
  } catch (const std::exception& e) {
    manifest.set_error(e.what());
    manifest.write(dir);
    throw;
  }
  return 0;
}

// --------------------------------------------------------------------- bench

int run_bench(const CommonOpts& common, std::vector<arsvd::Index> n_list,
              std::vector<arsvd::Index> p_list, arsvd::Index rank, int t,
              std::vector<std::string> modes) {
  const fs::path dir = ensure_out_dir(common.out);
  Manifest manifest("bench", common);
  if (modes.empty()) modes = {"rsvd", "eig", "svd"};
  if (n_list.empty() || p_list.empty()) {
    throw arsvd::ConfigError("bench: --n-list and --p-list are required");
  }
  if (n_list.size() == 1 && p_list.size() > 1) {
    n_list.assign(p_list.size(), n_list[0]);
  }
  if (n_list.size() != p_list.size()) {
    throw arsvd::ConfigError("bench: --n-list and --p-list lengths differ");
  }
  manifest.config() = {{"rank", rank}, {"t", t}, {"modes", modes}};

  // Dense-mode feasibility guards; rsvd always runs.
  const auto feasible = [&](const std::string& mode, arsvd::Index n,
                            arsvd::Index p) {
    if (mode == "svd") return n * p <= 20'000'000 && std::min(n, p) <= 1000;
    if (mode == "eig") return n <= 2000;
    return true;
  };

  try {
    std::ofstream csv(dir / "timings.csv");
    csv << "mode,n,p,seconds,status\n";
    std::map<std::string, std::vector<std::pair<double, double>>> points;
    for (std::size_t i = 0; i < p_list.size(); ++i) {
      const arsvd::Index n = n_list[i], p = p_list[i];
      const arsvd::Matrix x =
          arsvd::gaussian_matrix(n, p, common.rng().sub(1000 + i));
      for (const auto& mode : modes) {
        if (!feasible(mode, n, p)) {
          csv << mode << ',' << n << ',' << p << ",,skipped\n";
          continue;
        }
        const auto t0 = std::chrono::steady_clock::now();
        if (mode == "rsvd") {
          arsvd::ArsvdConfig cfg;
          cfg.d_max = std::min(rank, std::min(n, p));
          cfg.t_max = std::max(t, 1);
          cfg.seed = common.rng().sub(1);
          const auto f = arsvd::arsvd_fixed(x, cfg.d_max, cfg.t_max, cfg);
          (void)f;
        } else if (mode == "svd") {
          const auto f = arsvd::svd_exact(x);
          (void)f;
        } else if (mode == "eig") {
          const arsvd::Matrix gram = x * x.transpose();
          Eigen::SelfAdjointEigenSolver<arsvd::Matrix> eig(gram);
          if (eig.info() != Eigen::Success) {
            throw arsvd::NumericalError("bench: eigendecomposition failed");
          }
        } else {
          throw arsvd::ConfigError("bench: unknown mode '" + mode + "'");
        }
        const double sec =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                .count();
        csv << mode << ',' << n << ',' << p << ',' << arsvd::format_double(sec)
            << ",ok\n";
        points[mode].emplace_back(
            std::log(static_cast<double>(n) * static_cast<double>(p)),
            std::log(std::max(sec, 1e-9)));
      }
    }

    // Least-squares slope of log(seconds) on log(n*p) per mode.
    manifest.doc()["slopes"] = json::object();
    for (const auto& [mode, pts] : points) {
      if (pts.size() < 2) continue;
      double mx = 0, my = 0;
      for (const auto& [lx, ly] : pts) {
        mx += lx;
        my += ly;
      }
      mx /= static_cast<double>(pts.size());
      my /= static_cast<double>(pts.size());
      double sxx = 0, sxy = 0;
      for (const auto& [lx, ly] : pts) {
        sxx += (lx - mx) * (lx - mx);
        sxy += (lx - mx) * (ly - my);
      }
      const double slope = sxy / sxx;
      manifest.doc()["slopes"][mode] = slope;
      std::cout << "bench: " << mode << " log-log slope vs n*p = " << slope
                << '\n';
    }
    manifest.write(dir);
  } catch (const std::exception& e) {
    manifest.set_error(e.what());
    manifest.write(dir);
    throw;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive randomized low-rank factorization toolkit"};
  app.require_subcommand(1);

  CommonOpts svd_common, pca_common, assoc_common, lr_common, adm_common,
      bench_common;
  FactorOpts svd_fopts, pca_fopts, assoc_fopts;
  std::string svd_input, pca_input;

  auto* svd_cmd = app.add_subcommand("svd", "Low-rank factorization of a TSV matrix");
  svd_cmd->add_option("--input", svd_input, "Input matrix TSV")->required();
  add_common(svd_cmd, svd_common);
  add_factor_opts(svd_cmd, svd_fopts);

  auto* pca_cmd = app.add_subcommand("pca", "PCA of a TSV matrix");
  pca_cmd->add_option("--input", pca_input, "Input matrix TSV")->required();
  add_common(pca_cmd, pca_common);
  add_factor_opts(pca_cmd, pca_fopts);

  auto* sim_cmd = app.add_subcommand("sim", "Simulators");
  sim_cmd->require_subcommand(1);
  arsvd::Index lr_n = 100, lr_p = 100, lr_rank = 5;
  double lr_kappa = 1.0;
  auto* lr_cmd = sim_cmd->add_subcommand("lowrank", "Low-rank plus noise matrix");
  lr_cmd->add_option("--n", lr_n, "Rows");
  lr_cmd->add_option("--p", lr_p, "Columns");
  lr_cmd->add_option("--rank", lr_rank, "True rank");
  lr_cmd->add_option("--kappa", lr_kappa, "Signal-to-noise");
  add_common(lr_cmd, lr_common);

  arsvd::Index adm_n = 200, adm_p = 1000;
  int adm_pops = 3, adm_pheno_pop = 1;
  double adm_alpha = 1.0;
  auto* adm_cmd = sim_cmd->add_subcommand("admixture", "Null-GWAS admixture data");
  adm_cmd->add_option("--n", adm_n, "Individuals");
  adm_cmd->add_option("--p", adm_p, "Variants");
  adm_cmd->add_option("--pops", adm_pops, "Populations");
  adm_cmd->add_option("--alpha", adm_alpha, "Dirichlet concentration");
  adm_cmd->add_option("--pheno-pop", adm_pheno_pop,
                      "1-based population driving the phenotype");
  add_common(adm_cmd, adm_common);

  AssocFiles assoc_files;
  auto* assoc_cmd = app.add_subcommand("assoc", "Mixed-model association scan");
  assoc_cmd->add_option("--genotypes", assoc_files.genotypes, "Genotype TSV")
      ->required();
  assoc_cmd->add_option("--phenotype", assoc_files.phenotype, "Phenotype TSV")
      ->required();
  assoc_cmd->add_option("--covariates", assoc_files.covariates,
                        "Covariate TSV (intercept is added automatically)");
  assoc_cmd->add_option("--exclude-group", assoc_files.groups,
                        "Groups TSV; runs one leave-group-out scan per group");
  auto* naive_flag = assoc_cmd->add_flag("--naive", assoc_files.naive,
                                         "Per-variant OLS, no random effect");
  naive_flag->excludes(assoc_cmd->get_option("--exclude-group"));
  add_common(assoc_cmd, assoc_common);
  add_factor_opts(assoc_cmd, assoc_fopts);

  std::vector<arsvd::Index> bench_n, bench_p;
  arsvd::Index bench_rank = 50;
  int bench_t = 3;
  std::vector<std::string> bench_modes;
  auto* bench_cmd = app.add_subcommand("bench", "Decomposition run-time scaling");
  bench_cmd->add_option("--n-list", bench_n, "Row counts")
      ->delimiter(',')
      ->required();
  bench_cmd->add_option("--p-list", bench_p, "Column counts")
      ->delimiter(',')
      ->required();
  bench_cmd->add_option("--rank", bench_rank, "rsvd target rank");
  bench_cmd->add_option("--t", bench_t, "rsvd iterations");
  bench_cmd->add_option("--mode", bench_modes, "svd | eig | rsvd (repeatable)")
      ->delimiter(',');
  add_common(bench_cmd, bench_common);

  try {
    app.parse(argc, argv);
    if (svd_cmd->parsed()) return run_svd(svd_common, svd_fopts, svd_input, false);
    if (pca_cmd->parsed()) return run_svd(pca_common, pca_fopts, pca_input, true);
    if (lr_cmd->parsed()) {
      return run_sim_lowrank(lr_common, lr_n, lr_p, lr_rank, lr_kappa);
    }
    if (adm_cmd->parsed()) {
      return run_sim_admixture(adm_common, adm_n, adm_p, adm_pops, adm_alpha,
                               adm_pheno_pop - 1);
    }
    if (assoc_cmd->parsed()) return run_assoc(assoc_common, assoc_fopts, assoc_files);
    if (bench_cmd->parsed()) {
      return run_bench(bench_common, bench_n, bench_p, bench_rank, bench_t,
                       bench_modes);
    }
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);  // prints usage / help text
    return code == 0 ? 0 : 2;
  } catch (const arsvd::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const arsvd::DataError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const arsvd::NumericalError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 4;
  }
  return 0;
}
