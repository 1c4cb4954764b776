// ura-sim: command line front end for the unsourced random access simulator.
//
// Subcommands:
//   simulate         full Monte Carlo pipeline, writes results.csv etc.
//   detect           run the activity detector on a saved received block
//   optimize-lengths parity length allocation as JSON
//   fisher           predicted vs. empirical error-distribution exports
//
// Exit codes: 0 success, 2 configuration error, 3 numerical failure.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ura/codebook.hpp"
#include "ura/errors.hpp"
#include "ura/fisher.hpp"
#include "ura/harness.hpp"
#include "ura/inner_detector.hpp"
#include "ura/length_optimizer.hpp"
#include "ura/population.hpp"
#include "ura/version.hpp"

namespace {

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

ura::ConfigMap load_config(const std::string& path,
                           const std::vector<std::string>& overrides) {
  ura::ConfigMap cfg = path.empty() ? ura::ConfigMap()
                                    : ura::ConfigMap::parse_file(path);
  for (const std::string& kv : overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0)
      throw ura::ConfigError("--set expects key=value, got '" + kv + "'");
    cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  return cfg;
}

int cmd_simulate(const std::string& config_path, const std::string& sweep,
                 int trials, const std::string& out_dir,
                 const std::vector<std::string>& overrides) {
  ura::ConfigMap cfg = load_config(config_path, overrides);
  if (!sweep.empty()) {
    const auto eq = sweep.find('=');
    if (eq == std::string::npos)
      throw ura::ConfigError("--sweep expects axis=v1,v2,..., got '" + sweep +
                             "'");
    cfg.set("sweep_axis", sweep.substr(0, eq));
    cfg.set("sweep_values", sweep.substr(eq + 1));
  }
  if (trials > 0) cfg.set("trials", std::to_string(trials));

  const ura::ExperimentConfig exp = ura::experiment_config_from(cfg);
  const ura::MetricsReport report = ura::run_experiment(exp);
  ura::write_artifacts(report, exp, out_dir);

  for (const ura::SweepRow& r : report.rows)
    std::printf("%s%s%s arm=%-9s p_md=%.5f p_fa=%.5f p_e=%.5f aborted=%d\n",
                r.axis.c_str(), r.axis.empty() ? "" : "=",
                r.axis.empty() ? "single-point" : fmt_double(r.value).c_str(),
                r.arm.c_str(), r.p_md, r.p_fa, r.p_e, r.aborted);
  std::printf("artifacts written to %s (seed %llu, hash %s)\n",
              out_dir.c_str(),
              static_cast<unsigned long long>(report.seed),
              report.config_hash.c_str());
  if (report.failed) {
    std::fprintf(stderr,
                 "error: %d of %lld trials aborted (> 1%% threshold)\n",
                 report.total_aborted, report.total_trials);
    return 3;
  }
  return 0;
}

int cmd_detect(const std::string& y_path, const std::string& cb_path,
               double sigma2, const std::string& g_tilde_path,
               const std::string& r_diag_path, bool baseline,
               std::uint64_t seed, const std::string& gamma_out) {
  const Eigen::MatrixXcd y = ura::load_block(y_path);
  const ura::Codebook cb = ura::load_codebook(cb_path);
  if (y.rows() != cb.n0)
    throw ura::ConfigError("received block rows do not match codebook n0");

  ura::EffectiveChannelModel model;
  model.g_tilde = Eigen::MatrixXcd::Zero(cb.num_codewords(), y.cols());
  model.r_diag = Eigen::VectorXd::Ones(cb.num_codewords());
  if (!g_tilde_path.empty()) model.g_tilde = ura::load_block(g_tilde_path);
  if (!r_diag_path.empty()) {
    const Eigen::MatrixXcd r = ura::load_block(r_diag_path);
    if (r.cols() != 1 || r.rows() != cb.num_codewords())
      throw ura::ConfigError("--r-diag must be a 2^J x 1 block");
    model.r_diag = r.col(0).real();
  }

  ura::DetectorOptions opts;
  opts.mode = baseline ? ura::DetectorMode::kZeroMeanBaseline
                       : ura::DetectorMode::kNonzeroMean;
  ura::Rng rng{seed};
  const ura::DetectorResult res =
      ura::detect(y, cb, model, sigma2, opts, rng);

  std::printf("iterations=%d converged=%d accepted=%lld reverts=%d\n",
              res.iterations, res.converged ? 1 : 0, res.stats.accepted,
              res.stats.reverts);
  std::printf("trace:");
  for (double v : res.trace) std::printf(" %s", fmt_double(v).c_str());
  std::printf("\ngamma_hat:\n");
  for (Eigen::Index r = 0; r < res.gamma.size(); ++r)
    std::printf("%lld,%s\n", static_cast<long long>(r),
                fmt_double(res.gamma(r)).c_str());
  if (!gamma_out.empty()) {
    Eigen::MatrixXcd g(res.gamma.size(), 1);
    g.col(0) = res.gamma.cast<std::complex<double>>();
    ura::save_block(g, gamma_out);
  }
  return 0;
}

int cmd_optimize_lengths(int k, int l, int j, int b, double p_th, bool relax,
                         bool exhaustive) {
  const ura::LengthAllocation alloc =
      exhaustive ? ura::exhaustive_oracle(k, l, j, b, p_th, relax)
                 : ura::optimize_lengths(k, l, j, b, p_th, relax);
  std::printf("{\n  \"a\": [");
  for (std::size_t i = 0; i < alloc.a.size(); ++i)
    std::printf("%s%d", i ? ", " : "", alloc.a[i]);
  std::printf("],\n");
  std::printf("  \"xi\": %s,\n", fmt_double(alloc.xi).c_str());
  std::printf("  \"e_chi\": %s,\n", fmt_double(alloc.e_chi).c_str());
  std::printf("  \"xi_relaxed\": %s,\n", fmt_double(alloc.xi_relaxed).c_str());
  std::printf("  \"e_chi_relaxed\": %s,\n",
              fmt_double(alloc.e_chi_relaxed).c_str());
  std::printf("  \"p_th\": %s,\n", fmt_double(alloc.p_th).c_str());
  std::printf("  \"feasible\": %s,\n", alloc.feasible ? "true" : "false");
  std::printf("  \"best_effort\": %s,\n",
              alloc.best_effort ? "true" : "false");
  std::printf("  \"min_attainable_e_chi\": %s\n}\n",
              fmt_double(alloc.min_attainable_e_chi).c_str());
  return 0;
}

int cmd_fisher(int n0, int j, int m, int k_a, double kappa, double sigma2,
               int trials, std::uint64_t seed, const std::string& out_dir) {
  // Strong-LOS comparison instance: K_a UEs, UE k pinned to codeword k, so
  // gamma-tilde-true is supported on the first K_a coordinates.
  ura::Rng rng{seed};
  const int n = 1 << j;
  if (k_a > n) throw ura::ConfigError("--k-a cannot exceed 2^J");
  ura::Population pop =
      ura::build_population(k_a, m, 100.0, ura::BetaMode::kUnit, rng, kappa);
  const ura::Codebook cb = ura::generate_codebook(n0, j, 1.0, rng, seed);
  std::vector<int> active(k_a);
  std::vector<std::uint32_t> tx(k_a);
  for (int k = 0; k < k_a; ++k) {
    active[k] = k;
    tx[k] = static_cast<std::uint32_t>(k);
  }
  const ura::EffectiveChannelModel model =
      ura::genie_effective_channel(pop, active, tx, n);
  const Eigen::VectorXd gamma_true =
      ura::genie_gamma_tilde(pop, active, tx, n);

  const Eigen::MatrixXd f =
      ura::fisher_matrix(gamma_true, cb, model, sigma2, m);
  const ura::PredictedErrors pred = ura::predicted_error_distribution(f);

  ura::DetectorOptions opts;
  opts.i_max = 120;
  opts.eps = 1e-7;
  opts.t_max = 6 * n;
  const ura::ErrorSample sample = ura::collect_error_samples(
      cb, model, gamma_true, sigma2, m, trials, opts, seed);

  std::filesystem::create_directories(out_dir);
  const std::filesystem::path base(out_dir);
  ura::write_error_samples_csv(sample, out_dir);
  ura::write_error_histogram_csv(sample, 41,
                                 (base / "error_histogram.csv").string());
  ura::write_error_scatter_csv(sample, gamma_true,
                               (base / "error_scatter.csv").string());
  ura::write_error_summary_json(sample, pred.variance,
                                (base / "error_summary.json").string());
  std::printf("trials=%d proposed_wins=%d/%d regularized=%d\n", sample.trials,
              sample.proposed_wins, n, pred.regularized ? 1 : 0);
  std::printf("exports written to %s\n", out_dir.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-layer unsourced random access simulator"};
  app.set_version_flag("--version", std::string(ura::kVersion));
  app.require_subcommand(1);

  // simulate
  auto* sim = app.add_subcommand("simulate", "Run the Monte Carlo pipeline");
  std::string sim_config, sim_sweep, sim_out = "out";
  int sim_trials = 0;
  std::vector<std::string> sim_sets;
  sim->add_option("--config", sim_config, "key = value configuration file");
  sim->add_option("--sweep", sim_sweep, "axis=v1,v2,... sweep specification");
  sim->add_option("--trials", sim_trials, "Monte Carlo trials per point");
  sim->add_option("--out", sim_out, "output directory");
  sim->add_option("--set", sim_sets, "key=value override (repeatable)");

  // detect
  auto* det = app.add_subcommand("detect", "Detect activity in a saved block");
  std::string det_y, det_cb, det_g, det_r, det_out;
  double det_sigma2 = 1.0;
  std::uint64_t det_seed = 1;
  bool det_baseline = false;
  det->add_option("--y", det_y, "received block file")->required();
  det->add_option("--codebook", det_cb, "codebook file")->required();
  det->add_option("--sigma2", det_sigma2, "noise variance");
  det->add_option("--g-tilde", det_g, "effective channel mean block");
  det->add_option("--r-diag", det_r, "scattered variance block (2^J x 1)");
  det->add_flag("--baseline", det_baseline, "zero-mean baseline mode");
  det->add_option("--seed", det_seed, "coordinate draw seed");
  det->add_option("--gamma-out", det_out, "write gamma_hat as a block file");

  // optimize-lengths
  auto* opt = app.add_subcommand("optimize-lengths",
                                 "Parity length allocation (JSON output)");
  int opt_k = 0, opt_l = 0, opt_j = 0, opt_b = 0;
  double opt_pth = 0.05;
  bool opt_relax = false, opt_exhaustive = false;
  opt->add_option("--K", opt_k, "list size")->required();
  opt->add_option("--L", opt_l, "number of sub-slots")->required();
  opt->add_option("--J", opt_j, "bits per sub-block")->required();
  opt->add_option("--b", opt_b, "message bits")->required();
  opt->add_option("--p-th", opt_pth, "bound on E[chi_L]");
  opt->add_flag("--relax", opt_relax, "best-effort output when infeasible");
  opt->add_flag("--exhaustive", opt_exhaustive, "use the exhaustive oracle");

  // fisher
  auto* fis = app.add_subcommand(
      "fisher", "Predicted vs. empirical error-distribution exports");
  int fis_n0 = 32, fis_j = 4, fis_m = 128, fis_ka = 16, fis_trials = 200;
  double fis_kappa = 10.0, fis_sigma2 = 1.0;
  std::uint64_t fis_seed = 1;
  std::string fis_out = "fisher_out";
  fis->add_option("--n0", fis_n0, "sub-slot symbols");
  fis->add_option("--J", fis_j, "bits per sub-block");
  fis->add_option("--M", fis_m, "BS antennas");
  fis->add_option("--k-a", fis_ka, "active UEs");
  fis->add_option("--kappa", fis_kappa, "fixed Rician factor");
  fis->add_option("--sigma2", fis_sigma2, "noise variance");
  fis->add_option("--trials", fis_trials, "Monte Carlo trials");
  fis->add_option("--seed", fis_seed, "RNG seed");
  fis->add_option("--out", fis_out, "output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed())
      return cmd_simulate(sim_config, sim_sweep, sim_trials, sim_out,
                          sim_sets);
    if (det->parsed())
      return cmd_detect(det_y, det_cb, det_sigma2, det_g, det_r, det_baseline,
                        det_seed, det_out);
    if (opt->parsed())
      return cmd_optimize_lengths(opt_k, opt_l, opt_j, opt_b, opt_pth,
                                  opt_relax, opt_exhaustive);
    if (fis->parsed())
      return cmd_fisher(fis_n0, fis_j, fis_m, fis_ka, fis_kappa, fis_sigma2,
                        fis_trials, fis_seed, fis_out);
  } catch (const ura::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const ura::NumericalError& e) {
    std::fprintf(stderr, "numerical error: %s\n", e.what());
    return 3;
  }
  return 0;
}
