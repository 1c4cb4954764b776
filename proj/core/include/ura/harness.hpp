#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "ura/codebook.hpp"
#include "ura/config.hpp"
#include "ura/inner_detector.hpp"
#include "ura/outer_code.hpp"
#include "ura/population.hpp"

namespace ura {

// Everything one coherence block carries: the active messages, their
// per-slot codeword indices, the true per-slot supports and activity values
// gamma_l, and the received blocks.
struct TransmissionRound {
  std::vector<std::vector<int>> messages;               // K_a x b bits
  std::vector<std::vector<std::uint32_t>> tx_index;     // [L][K_a], 0-based
  std::vector<std::vector<std::uint32_t>> true_support; // [L], sorted unique
  std::vector<Eigen::VectorXd> gamma_l;                 // [L], beta sums, length 2^J
  std::vector<Eigen::MatrixXcd> y;                      // [L], n0 x M
};

// Outer-encodes the messages and synthesizes Y_l = C A_l B^{1/2} H + Z_l for
// every sub-slot. The equivalent compact form C Gamma_l^{1/2} H~_l is
// computed as well and the two must agree to 1e-10 relative Frobenius
// (NumericalError otherwise). Messages must be distinct.
TransmissionRound synthesize_received(
    const std::vector<std::vector<int>>& messages,
    const AllocationProfile& alloc, const ParityGeneratorSet& gens,
    const Population& pop, const ChannelDraw& draw, const Codebook& cb,
    double sigma2, Rng& rng);

struct ExperimentConfig {
  SystemConfig sys;
  BetaMode beta_mode = BetaMode::kUnit;
  bool genie_channel = true;  // false: population-prior side information
  std::vector<int> a_tail;    // parity allocation; empty -> optimize_lengths
  double p_th = 0.05;
  int trials = 200;
  std::string sweep_axis;     // one of m,k_a,d_max,eb_n0_db,p_th; "" = single point
  std::vector<double> sweep_values;
  std::vector<std::string> arms{"proposed", "baseline"};
  DetectorOptions det;
  std::optional<double> kappa_fixed;
  ConfigMap raw;  // echoed into the manifest
};

ExperimentConfig experiment_config_from(const ConfigMap& cfg);

struct SweepRow {
  std::string axis;
  double value = 0.0;
  std::string arm;
  int trials = 0;
  int aborted = 0;
  int message_collisions = 0;
  double p_md = 0.0, p_md_se = 0.0;
  double p_fa = 0.0, p_fa_se = 0.0;
  double p_e = 0.0;
  double support_precision = 0.0, support_recall = 0.0;
  double mean_survivors = 0.0;  // chi_L averaged over roots
  double mean_checks = 0.0;     // parity evaluations averaged over roots
};

struct TraceRow {
  double sweep_value = 0.0;
  std::string arm;
  int slot = 0;
  int iter = 0;
  double objective = 0.0;
};

struct MetricsReport {
  std::vector<SweepRow> rows;
  std::vector<TraceRow> trace_rows;  // first trial of each sweep point
  std::string config_hash;
  std::uint64_t seed = 0;
  long long total_trials = 0;
  int total_aborted = 0;
  bool failed = false;   // > 1% of trials aborted
  double wall_s = 0.0;   // not persisted to CSV
};

// Full pipeline per trial: population, codebook, channel, outer encode,
// synthesize, per-slot detect, support selection, stitching decode, Eqs.
// (6)-(7) aggregation. Per-trial RNG streams are derived from (seed, trial),
// so trial order and worker count cannot change results.
MetricsReport run_experiment(const ExperimentConfig& cfg);

// results.csv (one row per sweep point and arm; no timing columns so reruns
// are byte-identical), manifest.json (seed, version, config hash, echo),
// fig4_trace.csv, and fig7_pe.csv when sweeping m.
void write_results_csv(const MetricsReport& report, const std::string& path);
void write_manifest_json(const MetricsReport& report,
                         const ExperimentConfig& cfg, const std::string& path);
void write_fig4_trace_csv(const MetricsReport& report,
                          const std::string& path);
void write_fig7_pe_csv(const MetricsReport& report, const std::string& path);

// Writes all artifacts into dir (created if missing).
void write_artifacts(const MetricsReport& report, const ExperimentConfig& cfg,
                     const std::string& dir);

// Binary complex-matrix block I/O for replaying saved Y blocks through the
// CLI detect subcommand. Layout: 8-byte magic, u32 rows, u32 cols, row-major
// f64 re/im pairs.
void save_block(const Eigen::MatrixXcd& a, const std::string& path);
Eigen::MatrixXcd load_block(const std::string& path);

}  // namespace ura
