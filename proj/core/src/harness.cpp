#include "ura/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>

#include "ura/errors.hpp"
#include "ura/length_optimizer.hpp"
#include "ura/version.hpp"

namespace ura {
namespace {

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double mean_of(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double se_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1) /
                   static_cast<double>(v.size()));
}

std::vector<std::vector<int>> draw_distinct_messages(int k_a, int b, Rng& rng,
                                                     int* collisions) {
  std::set<std::vector<int>> seen;
  std::vector<std::vector<int>> out;
  out.reserve(k_a);
  while (static_cast<int>(out.size()) < k_a) {
    std::vector<int> msg(b);
    for (int i = 0; i < b; ++i)
      msg[i] = static_cast<int>(rng.uniform_below(2));
    if (!seen.insert(msg).second) {
      if (collisions) ++*collisions;
      continue;
    }
    out.push_back(std::move(msg));
  }
  return out;
}

SystemConfig apply_axis(SystemConfig sys, const std::string& axis,
                        double value) {
  if (axis.empty()) return sys;
  if (axis == "m")
    sys.m = static_cast<int>(value);
  else if (axis == "k_a")
    sys.k_a = static_cast<int>(value);
  else if (axis == "d_max")
    sys.d_max = value;
  else if (axis == "eb_n0_db")
    sys.eb_n0_db = value;
  else if (axis != "p_th")
    throw ConfigError("unknown sweep axis '" + axis +
                      "' (expected m, k_a, d_max, eb_n0_db or p_th)");
  return sys;
}

}  // namespace

TransmissionRound synthesize_received(
    const std::vector<std::vector<int>>& messages,
    const AllocationProfile& alloc, const ParityGeneratorSet& gens,
    const Population& pop, const ChannelDraw& draw, const Codebook& cb,
    double sigma2, Rng& rng) {
  const int k_a = static_cast<int>(messages.size());
  if (static_cast<int>(draw.active_set.size()) != k_a)
    throw ConfigError("synthesize_received: one message per active UE");
  {
    std::set<std::vector<int>> uniq(messages.begin(), messages.end());
    if (static_cast<int>(uniq.size()) != k_a)
      throw ConfigError("synthesize_received: messages must be distinct");
  }
  const int n = cb.num_codewords();
  const int m = pop.m;

  TransmissionRound round;
  round.messages = messages;
  round.tx_index.assign(alloc.l, std::vector<std::uint32_t>(k_a, 0));
  for (int k = 0; k < k_a; ++k) {
    const std::vector<std::uint32_t> subs =
        outer_encode(messages[k], alloc, gens);
    for (int l = 0; l < alloc.l; ++l) round.tx_index[l][k] = subs[l];
  }

  for (int l = 0; l < alloc.l; ++l) {
    std::vector<std::uint32_t> support(round.tx_index[l]);
    std::sort(support.begin(), support.end());
    support.erase(std::unique(support.begin(), support.end()), support.end());
    round.true_support.push_back(std::move(support));

    Eigen::VectorXd gamma = Eigen::VectorXd::Zero(n);
    // Eq. (9) form: sum over active UEs of c_{r_k} sqrt(beta_k) h_k^T.
    Eigen::MatrixXcd signal = Eigen::MatrixXcd::Zero(cb.n0, m);
    for (int k = 0; k < k_a; ++k) {
      const UeProfile& ue = pop.ues[draw.active_set[k]];
      const int r = static_cast<int>(round.tx_index[l][k]);
      gamma(r) += ue.beta;
      signal += cb.c.col(r) * (std::sqrt(ue.beta) *
                               draw.h.row(draw.active_set[k]));
    }
    // Eq. (10) compact form: C Gamma^{1/2} H~ with H~ row r the
    // beta-weighted sum of colliding rows divided by sqrt(gamma_r).
    Eigen::MatrixXcd h_tilde = Eigen::MatrixXcd::Zero(n, m);
    for (int k = 0; k < k_a; ++k) {
      const UeProfile& ue = pop.ues[draw.active_set[k]];
      const int r = static_cast<int>(round.tx_index[l][k]);
      h_tilde.row(r) +=
          std::sqrt(ue.beta) * draw.h.row(draw.active_set[k]);
    }
    Eigen::MatrixXcd compact = Eigen::MatrixXcd::Zero(cb.n0, m);
    for (int r = 0; r < n; ++r) {
      if (gamma(r) <= 0.0) continue;
      compact += cb.c.col(r) *
                 (std::sqrt(gamma(r)) * (h_tilde.row(r) / std::sqrt(gamma(r))));
    }
    const double ref = std::max(1.0, signal.norm());
    if ((signal - compact).norm() > 1e-10 * ref)
      throw NumericalError(
          "synthesize_received: activity-matrix and compact received forms "
          "disagree beyond 1e-10");

    Eigen::MatrixXcd y = signal;
    const double sd = std::sqrt(sigma2);
    for (int row = 0; row < cb.n0; ++row)
      for (int col = 0; col < m; ++col) y(row, col) += sd * rng.cnormal();
    round.gamma_l.push_back(std::move(gamma));
    round.y.push_back(std::move(y));
  }
  return round;
}

ExperimentConfig experiment_config_from(const ConfigMap& cfg) {
  ExperimentConfig out;
  out.sys = system_config_from(cfg);
  const std::string beta = cfg.get_str_or("beta_mode", "unit");
  if (beta == "unit")
    out.beta_mode = BetaMode::kUnit;
  else if (beta == "db_normalized")
    out.beta_mode = BetaMode::kDbNormalized;
  else
    throw ConfigError("beta_mode must be 'unit' or 'db_normalized', got '" +
                      beta + "'");
  out.genie_channel = cfg.get_int_or("genie_channel", 1) != 0;
  if (cfg.has("a_tail")) {
    out.a_tail = cfg.get_int_list("a_tail");
    // Accept the full (a_1..a_L) form as well; a_1 is always 0.
    if (static_cast<int>(out.a_tail.size()) == out.sys.l &&
        out.a_tail.front() == 0)
      out.a_tail.erase(out.a_tail.begin());
    if (static_cast<int>(out.a_tail.size()) != out.sys.l - 1)
      throw ConfigError("a_tail must list L-1 parity lengths (a_2..a_L)");
  }
  out.p_th = cfg.get_double_or("p_th", 0.05);
  out.trials = static_cast<int>(cfg.get_int_or("trials", 200));
  if (out.trials < 1) throw ConfigError("trials must be >= 1");
  out.sweep_axis = cfg.get_str_or("sweep_axis", "");
  if (cfg.has("sweep_values")) {
    out.sweep_values.clear();
    for (const std::string& tok : cfg.get_str_list("sweep_values")) {
      try {
        std::size_t pos = 0;
        const double v = std::stod(tok, &pos);
        if (pos != tok.size()) throw std::invalid_argument(tok);
        out.sweep_values.push_back(v);
      } catch (const std::exception&) {
        throw ConfigError("sweep_values entry '" + tok + "' is not a number");
      }
    }
  }
  if (!out.sweep_axis.empty() && out.sweep_values.empty())
    throw ConfigError("sweep_axis set but sweep_values empty");
  if (cfg.has("arms")) {
    out.arms = cfg.get_str_list("arms");
    for (const std::string& arm : out.arms)
      if (arm != "proposed" && arm != "baseline")
        throw ConfigError("arm must be 'proposed' or 'baseline', got '" + arm +
                          "'");
    if (out.arms.empty()) throw ConfigError("arms list empty");
  }
  out.det.i_max = static_cast<int>(cfg.get_int_or("det_i_max", 20));
  out.det.eps = cfg.get_double_or("det_eps", 0.01);
  out.det.t_max = static_cast<int>(cfg.get_int_or("det_t_max", 0));
  out.det.refresh_every =
      static_cast<int>(cfg.get_int_or("det_refresh_every", 0));
  if (cfg.has("kappa_fixed")) out.kappa_fixed = cfg.get_double("kappa_fixed");
  out.raw = cfg;
  return out;
}

MetricsReport run_experiment(const ExperimentConfig& cfg) {
  const auto t_start = std::chrono::steady_clock::now();
  MetricsReport report;
  report.config_hash = cfg.raw.hash();
  report.seed = cfg.sys.seed;

  std::vector<double> sweep_values = cfg.sweep_values;
  if (cfg.sweep_axis.empty()) sweep_values.assign(1, 0.0);

  for (std::size_t s = 0; s < sweep_values.size(); ++s) {
    const double value = sweep_values[s];
    SystemConfig sys = apply_axis(cfg.sys, cfg.sweep_axis, value);
    const double p_th = (cfg.sweep_axis == "p_th") ? value : cfg.p_th;

    std::vector<int> a_tail = cfg.a_tail;
    if (a_tail.empty())
      a_tail = optimize_lengths(sys.list_size(), sys.l, sys.j, sys.b, p_th).a;
    const AllocationProfile alloc = make_allocation(sys.l, sys.j, a_tail);
    Rng gen_rng{sys.seed, 777, static_cast<std::uint64_t>(s)};
    const ParityGeneratorSet gens = draw_parity_generators(alloc, gen_rng);

    struct ArmAccum {
      std::vector<double> p_md, p_fa;
      double precision_sum = 0.0, recall_sum = 0.0;
      long long slot_count = 0;
      double survivors_sum = 0.0;
      double checks_sum = 0.0;
      long long root_count = 0;
      int aborted = 0;
    };
    std::vector<ArmAccum> acc(cfg.arms.size());
    int collisions = 0;

    for (int t = 0; t < cfg.trials; ++t) {
      Rng syn_rng{sys.seed, static_cast<std::uint64_t>(s),
                  static_cast<std::uint64_t>(t)};
      Population pop;
      Codebook cb;
      ChannelDraw draw;
      TransmissionRound round;
      try {
        pop = build_population(sys, cfg.beta_mode, syn_rng, cfg.kappa_fixed);
        cb = generate_codebook(sys.n0, sys.j, sys.power(), syn_rng, sys.seed);
        draw = draw_channel(pop, sys.k_a, syn_rng);
        const std::vector<std::vector<int>> messages =
            draw_distinct_messages(sys.k_a, sys.b, syn_rng, &collisions);
        round = synthesize_received(messages, alloc, gens, pop, draw, cb,
                                    sys.sigma2, syn_rng);
      } catch (const NumericalError&) {
        for (ArmAccum& a : acc) ++a.aborted;
        report.total_aborted += static_cast<int>(acc.size());
        report.total_trials += static_cast<long long>(acc.size());
        continue;
      }

      const EffectiveChannelModel prior =
          cfg.genie_channel
              ? EffectiveChannelModel{}
              : prior_effective_channel(pop, sys.k_a, sys.num_codewords());

      for (std::size_t ai = 0; ai < cfg.arms.size(); ++ai) {
        ++report.total_trials;
        DetectorOptions det = cfg.det;
        det.mode = (cfg.arms[ai] == "baseline")
                       ? DetectorMode::kZeroMeanBaseline
                       : DetectorMode::kNonzeroMean;
        try {
          std::vector<std::vector<std::uint32_t>> lists(alloc.l);
          for (int l = 0; l < alloc.l; ++l) {
            const EffectiveChannelModel model =
                cfg.genie_channel
                    ? genie_effective_channel(pop, draw.active_set,
                                              round.tx_index[l],
                                              sys.num_codewords())
                    : prior;
            // Both arms see the same coordinate draw stream so the
            // comparison is paired.
            Rng det_rng{sys.seed, static_cast<std::uint64_t>(s),
                        static_cast<std::uint64_t>(t),
                        static_cast<std::uint64_t>(l), 9};
            const DetectorResult res =
                detect(round.y[l], cb, model, sys.sigma2, det, det_rng);
            if (t == 0) {
              for (std::size_t it = 0; it < res.trace.size(); ++it)
                report.trace_rows.push_back(
                    {value, cfg.arms[ai], l, static_cast<int>(it),
                     res.trace[it]});
            }
            const std::vector<int> support =
                select_support(res.gamma, sys.k_a_est(), sys.delta);
            lists[l].assign(support.begin(), support.end());

            long long hit = 0;
            for (std::uint32_t r : round.true_support[l])
              if (std::binary_search(lists[l].begin(), lists[l].end(), r))
                ++hit;
            acc[ai].precision_sum +=
                lists[l].empty()
                    ? 0.0
                    : static_cast<double>(hit) / lists[l].size();
            acc[ai].recall_sum +=
                round.true_support[l].empty()
                    ? 1.0
                    : static_cast<double>(hit) / round.true_support[l].size();
            ++acc[ai].slot_count;
          }

          const DecodeResult dec = outer_decode(lists, alloc, gens);
          for (const RootStat& rs : dec.root_stats) {
            acc[ai].survivors_sum += rs.survivors;
            acc[ai].checks_sum += static_cast<double>(rs.checks);
            ++acc[ai].root_count;
          }
          const std::set<std::vector<int>> decoded(dec.messages.begin(),
                                                   dec.messages.end());
          int missed = 0;
          for (const std::vector<int>& msg : round.messages)
            if (!decoded.count(msg)) ++missed;
          int false_alarms = 0;
          const std::set<std::vector<int>> truth(round.messages.begin(),
                                                 round.messages.end());
          for (const std::vector<int>& msg : decoded)
            if (!truth.count(msg)) ++false_alarms;
          acc[ai].p_md.push_back(
              sys.k_a > 0 ? static_cast<double>(missed) / sys.k_a : 0.0);
          acc[ai].p_fa.push_back(decoded.empty()
                                     ? 0.0
                                     : static_cast<double>(false_alarms) /
                                           decoded.size());
        } catch (const NumericalError&) {
          ++acc[ai].aborted;
          ++report.total_aborted;
        }
      }
    }

    for (std::size_t ai = 0; ai < cfg.arms.size(); ++ai) {
      SweepRow row;
      row.axis = cfg.sweep_axis;
      row.value = value;
      row.arm = cfg.arms[ai];
      row.trials = cfg.trials;
      row.aborted = acc[ai].aborted;
      row.message_collisions = collisions;
      row.p_md = mean_of(acc[ai].p_md);
      row.p_md_se = se_of(acc[ai].p_md);
      row.p_fa = mean_of(acc[ai].p_fa);
      row.p_fa_se = se_of(acc[ai].p_fa);
      row.p_e = row.p_md + row.p_fa;
      row.support_precision =
          acc[ai].slot_count ? acc[ai].precision_sum / acc[ai].slot_count : 0.0;
      row.support_recall =
          acc[ai].slot_count ? acc[ai].recall_sum / acc[ai].slot_count : 0.0;
      row.mean_survivors =
          acc[ai].root_count ? acc[ai].survivors_sum / acc[ai].root_count : 0.0;
      row.mean_checks =
          acc[ai].root_count ? acc[ai].checks_sum / acc[ai].root_count : 0.0;
      report.rows.push_back(std::move(row));
    }
  }

  report.failed =
      report.total_aborted * 100 > report.total_trials;  // > 1% aborted
  report.wall_s = std::chrono::duration<double>(
                      std::chrono::steady_clock::now() - t_start)
                      .count();
  return report;
}

void write_results_csv(const MetricsReport& report, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open '" + path + "' for writing");
  out << "axis,value,arm,trials,aborted,message_collisions,p_md,p_md_se,"
         "p_fa,p_fa_se,p_e,support_precision,support_recall,mean_survivors,"
         "mean_checks\n";
  for (const SweepRow& r : report.rows) {
    out << r.axis << ',' << fmt_double(r.value) << ',' << r.arm << ','
        << r.trials << ',' << r.aborted << ',' << r.message_collisions << ','
        << fmt_double(r.p_md) << ',' << fmt_double(r.p_md_se) << ','
        << fmt_double(r.p_fa) << ',' << fmt_double(r.p_fa_se) << ','
        << fmt_double(r.p_e) << ',' << fmt_double(r.support_precision) << ','
        << fmt_double(r.support_recall) << ',' << fmt_double(r.mean_survivors)
        << ',' << fmt_double(r.mean_checks) << '\n';
  }
}

void write_manifest_json(const MetricsReport& report,
                         const ExperimentConfig& cfg, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open '" + path + "' for writing");
  out << "{\n";
  out << "  \"seed\": " << report.seed << ",\n";
  out << "  \"version\": \"" << kVersion << "\",\n";
  out << "  \"config_hash\": \"" << report.config_hash << "\",\n";
  out << "  \"trials\": " << cfg.trials << ",\n";
  out << "  \"total_trials\": " << report.total_trials << ",\n";
  out << "  \"total_aborted\": " << report.total_aborted << ",\n";
  out << "  \"failed\": " << (report.failed ? "true" : "false") << ",\n";
  out << "  \"wall_clock_s\": " << fmt_double(report.wall_s) << ",\n";
  out << "  \"config\": {";
  bool first = true;
  for (const auto& [k, v] : cfg.raw.entries()) {
    if (!first) out << ',';
    first = false;
    out << "\n    \"" << k << "\": \"" << v << "\"";
  }
  out << "\n  }\n}\n";
}

void write_fig4_trace_csv(const MetricsReport& report,
                          const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open '" + path + "' for writing");
  out << "sweep_value,arm,slot,iter,objective\n";
  for (const TraceRow& r : report.trace_rows)
    out << fmt_double(r.sweep_value) << ',' << r.arm << ',' << r.slot << ','
        << r.iter << ',' << fmt_double(r.objective) << '\n';
}

void write_fig7_pe_csv(const MetricsReport& report, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open '" + path + "' for writing");
  out << "m,arm,p_md,p_fa,p_e\n";
  for (const SweepRow& r : report.rows)
    out << fmt_double(r.value) << ',' << r.arm << ',' << fmt_double(r.p_md)
        << ',' << fmt_double(r.p_fa) << ',' << fmt_double(r.p_e) << '\n';
}

void write_artifacts(const MetricsReport& report, const ExperimentConfig& cfg,
                     const std::string& dir) {
  std::filesystem::create_directories(dir);
  const std::filesystem::path base(dir);
  write_results_csv(report, (base / "results.csv").string());
  write_manifest_json(report, cfg, (base / "manifest.json").string());
  write_fig4_trace_csv(report, (base / "fig4_trace.csv").string());
  if (cfg.sweep_axis == "m")
    write_fig7_pe_csv(report, (base / "fig7_pe.csv").string());
}

namespace {
constexpr char kBlockMagic[8] = {'U', 'R', 'A', 'B', 'L', 'K', '0', '1'};
}

void save_block(const Eigen::MatrixXcd& a, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open '" + path + "' for writing");
  out.write(kBlockMagic, sizeof kBlockMagic);
  const std::uint32_t rows = static_cast<std::uint32_t>(a.rows());
  const std::uint32_t cols = static_cast<std::uint32_t>(a.cols());
  out.write(reinterpret_cast<const char*>(&rows), sizeof rows);
  out.write(reinterpret_cast<const char*>(&cols), sizeof cols);
  for (std::uint32_t i = 0; i < rows; ++i)
    for (std::uint32_t j = 0; j < cols; ++j) {
      const double re = a(i, j).real();
      const double im = a(i, j).imag();
      out.write(reinterpret_cast<const char*>(&re), sizeof re);
      out.write(reinterpret_cast<const char*>(&im), sizeof im);
    }
  if (!out) throw ConfigError("short write to '" + path + "'");
}

Eigen::MatrixXcd load_block(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  char magic[8];
  in.read(magic, sizeof magic);
  if (!in || !std::equal(magic, magic + 8, kBlockMagic))
    throw ConfigError("'" + path + "' is not a block file");
  std::uint32_t rows = 0, cols = 0;
  in.read(reinterpret_cast<char*>(&rows), sizeof rows);
  in.read(reinterpret_cast<char*>(&cols), sizeof cols);
  if (!in || rows == 0 || cols == 0)
    throw ConfigError("'" + path + "' has a corrupt block header");
  Eigen::MatrixXcd a(rows, cols);
  for (std::uint32_t i = 0; i < rows; ++i)
    for (std::uint32_t j = 0; j < cols; ++j) {
      double re = 0.0, im = 0.0;
      in.read(reinterpret_cast<char*>(&re), sizeof re);
      in.read(reinterpret_cast<char*>(&im), sizeof im);
      a(i, j) = {re, im};
    }
  if (!in) throw ConfigError("'" + path + "' truncated");
  return a;
}

}  // namespace ura
