// Acceptance gate for the two-layer URA simulator. Ten numbered criteria,
// each printed as one [PASS]/[FAIL] line with the measured quantities; the
// binary keeps running after a failure so the report is always complete and
// exits nonzero if any criterion failed.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdarg>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ura/codebook.hpp"
#include "ura/config.hpp"
#include "ura/errors.hpp"
#include "ura/fisher.hpp"
#include "ura/harness.hpp"
#include "ura/inner_detector.hpp"
#include "ura/length_optimizer.hpp"
#include "ura/outer_code.hpp"
#include "ura/population.hpp"
#include "ura/rng.hpp"

namespace {

using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXd;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string strfmt(const char* fmt, ...) {
  char buf[768];
  va_list args;
  va_start(args, fmt);
  std::vsnprintf(buf, sizeof(buf), fmt, args);
  va_end(args);
  return std::string(buf);
}

double elapsed_s(const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

MatrixXcd crandn(ura::Rng& rng, int rows, int cols) {
  MatrixXcd a(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) a(i, j) = rng.cnormal();
  return a;
}

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

// ---------------------------------------------------------------------------
// 1. Gradient oracle: analytic grad q vs central finite differences of
//    q(gamma) = objective(nonzero-mean) - objective(zero-mean) on 50 random
//    instances at n0=8, 4 codewords, M=4. Max relative error < 1e-5, < 10 s.
// ---------------------------------------------------------------------------
Outcome criterion_gradient_oracle() {
  const auto t0 = std::chrono::steady_clock::now();
  const int n0 = 8, n = 4, m = 4;
  const double h = 1e-6;
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    ura::Rng rng{101, static_cast<std::uint64_t>(trial)};
    const MatrixXcd c = crandn(rng, n0, n);
    const MatrixXcd y = crandn(rng, n0, m);
    ura::EffectiveChannelModel model;
    model.g_tilde = 0.3 * crandn(rng, n, m);
    model.r_diag = VectorXd::Ones(n);
    const double s2 = rng.uniform(0.5, 2.0);
    VectorXd gamma(n);
    for (int r = 0; r < n; ++r) gamma(r) = rng.uniform(0.0, 1.2);

    const VectorXd grad = ura::detector_grad_q(c, y, model, s2, gamma);
    const auto q_of = [&](const VectorXd& g) {
      return ura::detector_objective(c, y, model, s2, g) -
             ura::detector_objective(c, y, model, s2, g,
                                     ura::DetectorMode::kZeroMeanBaseline);
    };
    for (int r = 0; r < n; ++r) {
      VectorXd gp = gamma, gm = gamma;
      gp(r) += h;
      gm(r) -= h;
      const double fd = (q_of(gp) - q_of(gm)) / (2.0 * h);
      worst = std::max(worst,
                       std::abs(fd - grad(r)) / std::max(1.0, std::abs(fd)));
    }
  }
  const double secs = elapsed_s(t0);
  const bool pass = worst < 1e-5 && secs < 10.0;
  return {pass, strfmt("max relative gradient error %.3g over 50 instances "
                       "(gate 1e-5), %.1fs (limit 10)",
                       worst, secs)};
}

// ---------------------------------------------------------------------------
// 2. Coordinate-update oracle: the closed-form step d* matches a scalar
//    search (growing-step minimum bracketing from the left edge of the
//    feasible interval, then golden section inside the bracket) to 1e-7 on
//    1000 (state, r) pairs drawn from realistic detector states, including
//    100 forced near-degenerate n3. Pairs whose surrogate has no first local
//    minimum on the feasible interval (negative discriminant, or both
//    stationary points clamped off) are resampled; those branches take
//    heuristic completion steps that a line-search oracle cannot certify and
//    are covered by dedicated unit tests. Runtime < 30 s.
// ---------------------------------------------------------------------------
double bracketed_minimum(double n1, double n2, double n3, double gamma_r) {
  const double d_lo = std::max(-gamma_r, -1.0 / n1 + 1e-9);
  const auto f = [&](double d) { return ura::surrogate_change(d, n1, n2, n3); };
  double a = d_lo;
  const double fa = f(a);
  double step = 1e-7 * (1.0 + std::abs(d_lo));
  double b = a + step;
  double fb = f(b);
  while (fb >= fa) {
    step *= 0.25;
    if (step <= 1e-15 * (1.0 + std::abs(d_lo))) return a;  // edge minimum
    b = a + step;
    fb = f(b);
  }
  double c = b + step;
  double fc = f(c);
  int guard = 0;
  while (fc < fb && c < 1.0e3 && guard++ < 500) {
    step *= 1.6;
    a = b;
    b = c;
    fb = fc;
    c = b + step;
    fc = f(c);
  }
  double lo = a, hi = c;
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - invphi * (hi - lo), x2 = lo + invphi * (hi - lo);
  double f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < 240; ++it) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - invphi * (hi - lo);
      f1 = f(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + invphi * (hi - lo);
      f2 = f(x2);
    }
  }
  return std::max(0.5 * (lo + hi), -gamma_r);
}

Outcome criterion_coordinate_oracle() {
  const auto t0 = std::chrono::steady_clock::now();
  const int n0 = 8, ncw = 16, m = 8;
  int evaluated = 0, forced = 0, resampled = 0;
  double worst = 0.0;
  std::uint64_t attempt = 0;
  while (evaluated < 1000 && attempt < 20000) {
    ura::Rng rng{202, attempt++};
    const MatrixXcd c = crandn(rng, n0, ncw);
    const MatrixXcd y = crandn(rng, n0, m);
    ura::EffectiveChannelModel model;
    model.g_tilde = 0.5 * crandn(rng, ncw, m);
    model.r_diag = VectorXd::Constant(ncw, 0.5);
    const double s2 = rng.uniform(0.5, 1.5);
    ura::DetectorState st(c, y, s2);
    for (int t = 0; t < 12; ++t)
      st.apply_update(static_cast<int>(rng.uniform_below(ncw)),
                      rng.uniform(0.0, 0.3));
    const int r = static_cast<int>(rng.uniform_below(ncw));
    const double n1 = st.n1(r);
    const double n2 = st.n2(r);
    const VectorXd grad =
        ura::detector_grad_q(c, y, model, s2, st.gamma());
    double n3 = -grad(r);
    const bool force = (evaluated % 10 == 9);
    if (force) {
      n3 = (evaluated % 20 == 9) ? 1e-13 : -1e-13;
    } else if (std::abs(n3) > 1e-12) {
      const double disc = n1 * n1 - 4.0 * n2 * n3;
      if (disc < 0.0) {
        ++resampled;
        continue;
      }
      if (n3 > 1e-12) {
        const double gamma_r_now = st.gamma()(r);
        const double d_lo = std::max(-gamma_r_now, -1.0 / n1 + 1e-9);
        const double u_plus = (n1 + std::sqrt(disc)) / (2.0 * n3);
        if ((u_plus - 1.0) / n1 <= d_lo + 1e-12) {
          ++resampled;  // both stationary points left of the feasible edge
          continue;
        }
      }
    }
    const double gamma_r = st.gamma()(r);
    const ura::CoordinateStep step = ura::coordinate_update(n1, n2, n3, gamma_r);
    const double d_oracle = bracketed_minimum(n1, n2, n3, gamma_r);
    worst = std::max(worst,
                     std::abs(step.d - d_oracle) / (1.0 + std::abs(d_oracle)));
    if (force) ++forced;
    ++evaluated;
  }
  const double secs = elapsed_s(t0);
  const bool pass = evaluated == 1000 && forced == 100 && worst < 1e-7 &&
                    secs < 30.0;
  return {pass,
          strfmt("max |d - d_oracle| %.3g over %d pairs (%d degenerate n3, "
                 "%d resampled; gate 1e-7), %.1fs (limit 30)",
                 worst, evaluated, forced, resampled, secs)};
}

// ---------------------------------------------------------------------------
// 3. Rank-1 consistency: after 500 random apply_update calls at n0=32 the
//    incrementally maintained inverse matches a fresh factorization to
//    Frobenius error < 1e-8.
// ---------------------------------------------------------------------------
Outcome criterion_rank1_consistency() {
  const int n0 = 32, ncw = 64, m = 8;
  ura::Rng rng{303};
  const MatrixXcd c = crandn(rng, n0, ncw);
  const MatrixXcd y = crandn(rng, n0, m);
  ura::DetectorState st(c, y, 1.0);
  int applied = 0;
  for (int t = 0; t < 500; ++t) {
    const int r = static_cast<int>(rng.uniform_below(ncw));
    double d = rng.uniform(-0.1, 0.4);
    if (st.gamma()(r) + d < 0.0) d = -st.gamma()(r);
    st.apply_update(r, d);
    ++applied;
  }
  const MatrixXcd fresh = Eigen::LLT<MatrixXcd>(st.sigma_tilde())
                              .solve(MatrixXcd::Identity(n0, n0));
  const double err = (st.sigma_tilde_inv() - fresh).norm();
  return {applied == 500 && err < 1e-8,
          strfmt("Frobenius drift %.3g after %d rank-1 updates (gate 1e-8)",
                 err, applied)};
}

// ---------------------------------------------------------------------------
// 4. Convergence: 64 codewords, n0=100, M cycling {64,128,256}, K_a=100 of
//    1000 UEs, genie side information, T_max = 6*2^J. The objective trace
//    must be monotone non-increasing and within 1% of its final value by
//    outer iteration 5 in at least 45 of 50 trials. Runtime < 10 min.
// ---------------------------------------------------------------------------
Outcome criterion_convergence() {
  const auto t0 = std::chrono::steady_clock::now();
  const int m_values[3] = {64, 128, 256};
  const int ncw = 64, n0 = 100, k_a = 100;
  int ok = 0;
  for (int t = 0; t < 50; ++t) {
    const int m = m_values[t % 3];
    ura::Rng rng{7, static_cast<std::uint64_t>(t)};
    const ura::Population pop =
        ura::build_population(1000, m, 300.0, ura::BetaMode::kUnit, rng);
    const ura::Codebook cb = ura::generate_codebook(n0, 6, 0.054, rng, 7);
    const ura::ChannelDraw draw = ura::draw_channel(pop, k_a, rng);
    std::vector<std::uint32_t> tx(k_a);
    for (int k = 0; k < k_a; ++k)
      tx[k] = static_cast<std::uint32_t>(rng.uniform_below(ncw));
    const ura::EffectiveChannelModel model =
        ura::genie_effective_channel(pop, draw.active_set, tx, ncw);
    MatrixXcd y = MatrixXcd::Zero(n0, m);
    for (int k = 0; k < k_a; ++k)
      y += cb.c.col(tx[k]) * draw.h.row(draw.active_set[k]);
    y += crandn(rng, n0, m);

    ura::DetectorOptions opts;
    opts.t_max = 6 * ncw;
    ura::Rng drng{8, static_cast<std::uint64_t>(t)};
    const ura::DetectorResult res = ura::detect(y, cb, model, 1.0, opts, drng);

    bool mono = true;
    for (std::size_t i = 1; i < res.trace.size(); ++i)
      if (res.trace[i] > res.trace[i - 1] + 1e-9) mono = false;
    const double fin = res.trace.back();
    const std::size_t idx = std::min<std::size_t>(5, res.trace.size() - 1);
    const bool within = std::abs(res.trace[idx] - fin) <= 0.01 * std::abs(fin);
    if (mono && within) ++ok;
  }
  const double secs = elapsed_s(t0);
  return {ok >= 45 && secs < 600.0,
          strfmt("%d/50 trials monotone and within 1%% of final by iteration "
                 "5 (need 45), %.0fs (limit 600)",
                 ok, secs)};
}

// ---------------------------------------------------------------------------
// 5. Fisher oracle: the analytic information matrix matches the Monte Carlo
//    mean of the finite-difference Hessian of the exact scaled negative
//    log-density (times M) within 3 standard errors entrywise over 1e4 Y
//    draws at n0=6, 3 codewords, M=8. Runtime < 5 min.
// ---------------------------------------------------------------------------
Outcome criterion_fisher_oracle() {
  const auto t0 = std::chrono::steady_clock::now();
  const int n0 = 6, n = 3, m = 8, draws = 10000;
  const double h = 1e-3;

  ura::Rng setup{5000};
  ura::Codebook cb;
  cb.n0 = n0;
  cb.j = 2;  // bookkeeping only; the oracle instance uses 3 of 4 indices
  cb.p = 1.0;
  cb.seed = 5000;
  cb.c = crandn(setup, n0, n);
  ura::EffectiveChannelModel model;
  model.g_tilde = 0.5 * crandn(setup, n, m);
  model.r_diag = VectorXd::Constant(n, 0.5);
  VectorXd gs(n);
  gs << 0.8, 0.5, 0.3;
  const double s2 = 1.0;

  const MatrixXd f_ana = ura::fisher_matrix(gs, cb, model, s2, m);

  MatrixXcd sigma = (cb.c * gs.asDiagonal()) * cb.c.adjoint();
  sigma += s2 * MatrixXcd::Identity(n0, n0);
  const MatrixXcd lch = Eigen::LLT<MatrixXcd>(sigma).matrixL();
  const MatrixXcd e_mean = (cb.c * gs.asDiagonal()) * model.g_tilde;

  MatrixXd sum = MatrixXd::Zero(n, n), sumsq = MatrixXd::Zero(n, n);
  for (int t = 0; t < draws; ++t) {
    ura::Rng rng{5001, static_cast<std::uint64_t>(t)};
    const MatrixXcd y = e_mean + lch * crandn(rng, n0, m);
    const auto f = [&](const VectorXd& g) {
      return ura::detector_objective(cb.c, y, model, s2, g);
    };
    MatrixXd hess(n, n);
    const double f0 = f(gs);
    std::vector<double> fp(n), fm(n);
    for (int i = 0; i < n; ++i) {
      VectorXd gp = gs, gm = gs;
      gp(i) += h;
      gm(i) -= h;
      fp[i] = f(gp);
      fm[i] = f(gm);
      hess(i, i) = (fp[i] - 2.0 * f0 + fm[i]) / (h * h);
    }
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        VectorXd gpp = gs, gpm = gs, gmp = gs, gmm = gs;
        gpp(i) += h, gpp(j) += h;
        gpm(i) += h, gpm(j) -= h;
        gmp(i) -= h, gmp(j) += h;
        gmm(i) -= h, gmm(j) -= h;
        hess(i, j) = (f(gpp) - f(gpm) - f(gmp) + f(gmm)) / (4.0 * h * h);
        hess(j, i) = hess(i, j);
      }
    }
    const MatrixXd s = static_cast<double>(m) * hess;
    sum += s;
    sumsq += s.cwiseProduct(s);
  }
  const MatrixXd mean = sum / draws;
  const MatrixXd var =
      (sumsq - static_cast<double>(draws) * mean.cwiseProduct(mean)) /
      (draws - 1.0);
  double zmax = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double se = std::sqrt(std::max(var(i, j), 0.0) / draws);
      const double z = std::abs(mean(i, j) - f_ana(i, j)) / std::max(se, 1e-12);
      zmax = std::max(zmax, z);
    }
  }
  const double secs = elapsed_s(t0);
  return {zmax <= 3.0 && secs < 300.0,
          strfmt("max entrywise |FD Hessian - F| = %.2f standard errors over "
                 "%d draws (gate 3), %.0fs (limit 300)",
                 zmax, draws, secs)};
}

// ---------------------------------------------------------------------------
// 6. Error-distribution reproduction: strong-LOS instance (kappa=10 fixed,
//    16 codewords, n0=32, M=128, 500 paired trials). The proposed detector
//    must have smaller empirical error variance than the baseline in at
//    least 13 of 16 coordinates and a pooled error mean within 3 standard
//    errors of zero.
// ---------------------------------------------------------------------------
Outcome criterion_error_distribution() {
  ura::Rng master{42};
  const ura::Population pop =
      ura::build_population(16, 128, 100.0, ura::BetaMode::kUnit, master, 10.0);
  const ura::Codebook cb = ura::generate_codebook(32, 4, 1.0, master, 42);
  std::vector<int> active(16);
  std::vector<std::uint32_t> tx(16);
  for (int k = 0; k < 16; ++k) {
    active[k] = k;
    tx[k] = static_cast<std::uint32_t>(k);
  }
  const ura::EffectiveChannelModel model =
      ura::genie_effective_channel(pop, active, tx, 16);
  const VectorXd gtrue = ura::genie_gamma_tilde(pop, active, tx, 16);
  ura::DetectorOptions opts;
  opts.i_max = 120;
  opts.eps = 1e-7;
  opts.t_max = 96;
  const ura::ErrorSample sample =
      ura::collect_error_samples(cb, model, gtrue, 1.0, 128, 500, opts, 42);

  const MatrixXd& e = sample.errors_proposed;
  const double tn = static_cast<double>(e.rows()) * e.cols();
  const double mean = e.sum() / tn;
  const double var = (e.array() - mean).square().sum() / (tn - 1.0);
  const double z = std::abs(mean) / std::sqrt(var / tn);
  const bool pass = sample.proposed_wins >= 13 && z <= 3.0;
  return {pass,
          strfmt("proposed variance smaller in %d/16 coordinates (need 13); "
                 "pooled mean %.2e at |z| = %.2f (gate 3)",
                 sample.proposed_wins, mean, z)};
}

// ---------------------------------------------------------------------------
// 7. Outer-code bound: Monte Carlo survival paths and checked nodes against
//    the closed-form E[chi_L] and Xi. K_a=3 true messages, delta=2 random
//    decoys per list, L=4, J=4, allocation a=(0,1,1,1), generators redrawn
//    per trial, 1e4 trials, agreement within 3 standard errors.
// ---------------------------------------------------------------------------
Outcome criterion_outer_bound() {
  const int kk = 5, ll = 4, trials = 10000;
  const ura::AllocationProfile alloc = ura::make_allocation(ll, 4, {1, 1, 1});
  const double e_chi_ref = ura::expected_survivors(kk, ll, {0.5, 0.5, 0.5});
  const double xi_ref = ura::decoding_complexity(kk, ll, {1, 1, 1});
  if (std::abs(e_chi_ref - 19.5) > 1e-12 || std::abs(xi_ref - 60.0) > 1e-12)
    return {false, strfmt("closed forms moved: E[chi]=%.6f (want 19.5), "
                          "Xi=%.6f (want 60)",
                          e_chi_ref, xi_ref)};

  double sum_chi = 0.0, sumsq_chi = 0.0, sum_xi = 0.0, sumsq_xi = 0.0;
  for (int t = 0; t < trials; ++t) {
    ura::Rng rng{2024, static_cast<std::uint64_t>(t)};
    const ura::ParityGeneratorSet gens =
        ura::draw_parity_generators(alloc, rng);

    // Three true messages with pairwise-distinct data sections at every slot.
    std::vector<std::vector<std::uint32_t>> data(3,
                                                 std::vector<std::uint32_t>(ll));
    for (int l = 0; l < ll; ++l) {
      std::set<std::uint32_t> used;
      for (int k = 0; k < 3; ++k) {
        std::uint32_t v;
        do {
          v = static_cast<std::uint32_t>(
              rng.uniform_below(1ull << alloc.b_l[l]));
        } while (used.count(v));
        used.insert(v);
        data[k][l] = v;
      }
    }
    std::vector<std::uint32_t> roots(3);
    std::vector<std::vector<std::uint32_t>> lists(ll);
    for (int k = 0; k < 3; ++k) {
      std::vector<int> bits;
      for (int l = 0; l < ll; ++l)
        for (int i = alloc.b_l[l] - 1; i >= 0; --i)
          bits.push_back(static_cast<int>((data[k][l] >> i) & 1u));
      const std::vector<std::uint32_t> cw = ura::outer_encode(bits, alloc, gens);
      roots[k] = cw[0];
      for (int l = 0; l < ll; ++l) lists[l].push_back(cw[l]);
    }
    // Two decoys per list: data uniform over the non-true values (distinct),
    // parity section iid uniform.
    for (int l = 0; l < ll; ++l) {
      std::set<std::uint32_t> used{data[0][l], data[1][l], data[2][l]};
      for (int dcy = 0; dcy < 2; ++dcy) {
        std::uint32_t v;
        do {
          v = static_cast<std::uint32_t>(
              rng.uniform_below(1ull << alloc.b_l[l]));
        } while (used.count(v));
        used.insert(v);
        std::uint32_t par = 0;
        if (alloc.a_l[l] > 0)
          par = static_cast<std::uint32_t>(
              rng.uniform_below(1ull << alloc.a_l[l]));
        lists[l].push_back((v << alloc.a_l[l]) | par);
      }
    }

    const ura::DecodeResult res = ura::outer_decode(lists, alloc, gens);
    double chi = 0.0, xi = 0.0;
    int found = 0;
    for (const ura::RootStat& rs : res.root_stats) {
      for (int k = 0; k < 3; ++k) {
        if (rs.root == roots[k]) {
          if (rs.survivors < 1)
            return {false, strfmt("trial %d: true path did not survive", t)};
          chi += rs.survivors - 1;
          xi += static_cast<double>(rs.checks);
          ++found;
          break;
        }
      }
    }
    if (found != 3)
      return {false, strfmt("trial %d: found %d of 3 true roots", t, found)};
    chi /= 3.0;
    xi /= 3.0;
    sum_chi += chi;
    sumsq_chi += chi * chi;
    sum_xi += xi;
    sumsq_xi += xi * xi;
  }
  const auto z_of = [trials](double sum, double sumsq, double ref) {
    const double mean = sum / trials;
    const double var = (sumsq - trials * mean * mean) / (trials - 1.0);
    const double se = std::sqrt(std::max(var, 1e-300) / trials);
    return std::make_pair(mean, std::abs(mean - ref) / se);
  };
  const auto [mean_chi, z_chi] = z_of(sum_chi, sumsq_chi, e_chi_ref);
  const auto [mean_xi, z_xi] = z_of(sum_xi, sumsq_xi, xi_ref);
  const bool pass = z_chi <= 3.0 && z_xi <= 3.0;
  return {pass,
          strfmt("chi %.3f vs %.1f (|z| = %.2f), Xi %.2f vs %.0f (|z| = "
                 "%.2f) over %d trials (gate 3)",
                 mean_chi, e_chi_ref, z_chi, mean_xi, xi_ref, z_xi, trials)};
}

// ---------------------------------------------------------------------------
// 8. Length-optimizer oracle: on 20 random small instances (seed 17) the
//    solver must agree with exhaustive enumeration on feasibility and land
//    on the oracle's Xi exactly or within one unit swap; on the reference
//    setup (K=110, L=20, J=15, b=155, p_th=0.05) the optimized Xi must be
//    strictly below the fixed allocation (7,...,7,11,11,11).
// ---------------------------------------------------------------------------
Outcome criterion_length_optimizer() {
  ura::Rng rng{17};
  int agree = 0, oneswap = 0, infeas = 0, mism = 0;
  for (int i = 0; i < 20; ++i) {
    const int l = 3 + static_cast<int>(rng.uniform_below(3));
    const int j = 2 + static_cast<int>(rng.uniform_below(4));
    const int k = 2 + static_cast<int>(rng.uniform_below(4));
    const int cap = j * (l - 1);
    const int budget =
        1 + static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(cap)));
    const int b = l * j - budget;
    // Anchor p_th to the attainable floor so both branches get exercised.
    std::vector<int> back(l - 1, 0);
    for (int t = l - 2, rem = budget; t >= 0; --t) {
      back[t] = std::min(j, rem);
      rem -= back[t];
    }
    const double floor_echi = ura::evaluate_allocation(back, k, l).second;
    const double p_th = floor_echi * std::pow(10.0, rng.uniform(-0.5, 1.5));
    bool ex_ok = true, op_ok = true;
    ura::LengthAllocation ex, op;
    try {
      ex = ura::exhaustive_oracle(k, l, j, b, p_th);
    } catch (const ura::ConfigError&) {
      ex_ok = false;
    }
    try {
      op = ura::optimize_lengths(k, l, j, b, p_th);
    } catch (const ura::ConfigError&) {
      op_ok = false;
    }
    if (ex_ok != op_ok) {
      ++mism;
      continue;
    }
    if (!ex_ok) {
      ++infeas;
      continue;
    }
    if (std::abs(op.xi - ex.xi) < 1e-9) {
      ++agree;
      continue;
    }
    int diff = 0;
    for (std::size_t t = 0; t < ex.a.size(); ++t)
      diff += std::abs(op.a[t] - ex.a[t]);
    if (diff <= 2)
      ++oneswap;
    else
      ++mism;
  }

  const ura::LengthAllocation opt = ura::optimize_lengths(110, 20, 15, 155, 0.05);
  std::vector<int> fixed(19, 7);
  fixed[16] = fixed[17] = fixed[18] = 11;
  const auto [xi_fixed, e_chi_fixed] = ura::evaluate_allocation(fixed, 110, 20);
  const bool ref_ok = opt.feasible && opt.xi < xi_fixed;
  const bool pass = mism == 0 && ref_ok;
  return {pass,
          strfmt("20 instances (seed 17): %d exact, %d unit-swap, %d "
                 "infeasible-agree, %d mismatch (need 0); reference Xi %.1f "
                 "< fixed %.1f (E[chi] %.4f vs %.4f)",
                 agree, oneswap, infeas, mism, opt.xi, xi_fixed, opt.e_chi,
                 e_chi_fixed)};
}

// ---------------------------------------------------------------------------
// 9. End-to-end ordering, two sub-experiments at 64 codewords, K_a=10,
//    d_max=100 m, unit beta, 100 trials:
//    (a) n0=16, Eb/N0 = -9 dB: proposed p_e strictly decreasing over
//        M in {64,128,256};
//    (b) n0=5, Eb/N0 = +4 dB: proposed p_e <= baseline p_e at every M.
// ---------------------------------------------------------------------------
ura::MetricsReport run_ordering_experiment(const std::string& n0,
                                           const std::string& eb,
                                           const std::string& seed) {
  ura::ConfigMap cm;
  cm.set("k_tot", "100");
  cm.set("k_a", "10");
  cm.set("m", "64");
  cm.set("l", "4");
  cm.set("n0", n0);
  cm.set("j", "6");
  cm.set("b", "6");
  cm.set("eb_n0_db", eb);
  cm.set("d_max", "100");
  cm.set("seed", seed);
  cm.set("epsilon", "0.1");
  cm.set("delta", "2");
  cm.set("trials", "100");
  cm.set("a_tail", "0,6,6,6");
  cm.set("sweep_axis", "m");
  cm.set("sweep_values", "64,128,256");
  return ura::run_experiment(ura::experiment_config_from(cm));
}

Outcome criterion_end_to_end() {
  const ura::MetricsReport rep_a = run_ordering_experiment("16", "-9", "123");
  std::vector<double> pe_a;
  for (const ura::SweepRow& r : rep_a.rows)
    if (r.arm == "proposed") pe_a.push_back(r.p_e);
  const bool a_ok = !rep_a.failed && pe_a.size() == 3 && pe_a[0] > pe_a[1] &&
                    pe_a[1] > pe_a[2];

  const ura::MetricsReport rep_b = run_ordering_experiment("5", "4", "321");
  std::vector<double> pe_prop, pe_base;
  for (const ura::SweepRow& r : rep_b.rows) {
    if (r.arm == "proposed") pe_prop.push_back(r.p_e);
    if (r.arm == "baseline") pe_base.push_back(r.p_e);
  }
  bool b_ok = !rep_b.failed && pe_prop.size() == 3 && pe_base.size() == 3;
  for (std::size_t i = 0; b_ok && i < 3; ++i)
    if (pe_prop[i] > pe_base[i]) b_ok = false;

  return {a_ok && b_ok,
          strfmt("(a) proposed p_e %.3f/%.3f/%.3f over M=64/128/256 %s; (b) "
                 "proposed %.3f/%.3f/%.3f vs baseline %.3f/%.3f/%.3f %s",
                 pe_a.size() > 2 ? pe_a[0] : -1.0,
                 pe_a.size() > 2 ? pe_a[1] : -1.0,
                 pe_a.size() > 2 ? pe_a[2] : -1.0,
                 a_ok ? "strictly decreasing" : "NOT strictly decreasing",
                 pe_prop.size() > 2 ? pe_prop[0] : -1.0,
                 pe_prop.size() > 2 ? pe_prop[1] : -1.0,
                 pe_prop.size() > 2 ? pe_prop[2] : -1.0,
                 pe_base.size() > 2 ? pe_base[0] : -1.0,
                 pe_base.size() > 2 ? pe_base[1] : -1.0,
                 pe_base.size() > 2 ? pe_base[2] : -1.0,
                 b_ok ? "(proposed <= baseline)" : "(ordering VIOLATED)")};
}

// ---------------------------------------------------------------------------
// 10. Determinism: rerunning a sweep experiment with the same seed must
//     produce byte-identical results.csv, fig4_trace.csv and fig7_pe.csv.
// ---------------------------------------------------------------------------
Outcome criterion_determinism() {
  ura::ConfigMap cm;
  cm.set("k_tot", "100");
  cm.set("k_a", "10");
  cm.set("m", "32");
  cm.set("l", "4");
  cm.set("n0", "16");
  cm.set("j", "6");
  cm.set("b", "6");
  cm.set("eb_n0_db", "4");
  cm.set("d_max", "100");
  cm.set("seed", "321");
  cm.set("epsilon", "0.1");
  cm.set("delta", "2");
  cm.set("trials", "5");
  cm.set("a_tail", "0,6,6,6");
  cm.set("sweep_axis", "m");
  cm.set("sweep_values", "32,64");
  const ura::ExperimentConfig cfg = ura::experiment_config_from(cm);

  namespace fs = std::filesystem;
  const fs::path base = fs::temp_directory_path() / "ura_acceptance_determinism";
  fs::remove_all(base);
  const fs::path d1 = base / "run1", d2 = base / "run2";
  const ura::MetricsReport r1 = ura::run_experiment(cfg);
  ura::write_artifacts(r1, cfg, d1.string());
  const ura::MetricsReport r2 = ura::run_experiment(cfg);
  ura::write_artifacts(r2, cfg, d2.string());

  const char* files[] = {"results.csv", "fig4_trace.csv", "fig7_pe.csv"};
  bool all_same = true;
  std::string sizes;
  for (const char* f : files) {
    const std::string c1 = slurp((d1 / f).string());
    const std::string c2 = slurp((d2 / f).string());
    if (c1.empty() || c1 != c2) all_same = false;
    sizes += strfmt("%s%s %zuB %s", sizes.empty() ? "" : ", ", f, c1.size(),
                    c1.empty() ? "EMPTY" : (c1 == c2 ? "identical" : "DIFFER"));
  }
  fs::remove_all(base);
  return {all_same, sizes};
}

struct Criterion {
  int id;
  const char* name;
  Outcome (*fn)();
};

}  // namespace

int main() {
  const Criterion criteria[] = {
      {1, "gradient oracle", criterion_gradient_oracle},
      {2, "coordinate-update oracle", criterion_coordinate_oracle},
      {3, "rank-1 inverse consistency", criterion_rank1_consistency},
      {4, "convergence within 5 iterations", criterion_convergence},
      {5, "fisher information oracle", criterion_fisher_oracle},
      {6, "error-distribution reproduction", criterion_error_distribution},
      {7, "outer-code survival bound", criterion_outer_bound},
      {8, "length-optimizer oracle", criterion_length_optimizer},
      {9, "end-to-end ordering", criterion_end_to_end},
      {10, "deterministic replay", criterion_determinism},
  };
  int failed = 0;
  for (const Criterion& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.fn();
    } catch (const std::exception& e) {
      out = {false, strfmt("unhandled exception: %s", e.what())};
    }
    std::printf("[%s] %02d %s: %s (%.1fs)\n", out.pass ? "PASS" : "FAIL", c.id,
                c.name, out.detail.c_str(), elapsed_s(t0));
    std::fflush(stdout);
    if (!out.pass) ++failed;
  }
  if (failed == 0) {
    std::printf("acceptance: all 10 criteria passed\n");
    return 0;
  }
  std::printf("acceptance: %d of 10 criteria FAILED\n", failed);
  return 1;
}
