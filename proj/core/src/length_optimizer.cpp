#include "ura/length_optimizer.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <optional>

#include "ura/errors.hpp"
#include "ura/outer_code.hpp"

namespace ura {
namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr double kLn2 = 0.6931471805599453;

// Posynomial in log-sum-exp form: value = log sum_t exp(logc_t + A_t . a).
// Coefficients are kept in log space so K^(j-m) stays representable at the
// paper's K=110, L=20 scale.
struct LseTerms {
  VectorXd logc;
  MatrixXd a;  // terms x (L-1)
};

LseTerms xi_lse(int k, int l) {
  const int n = l - 1;
  std::vector<double> logc{std::log(static_cast<double>(k)) +
                           std::log(static_cast<double>(l - 1))};
  std::vector<VectorXd> rows{VectorXd::Zero(n)};
  for (int j = 2; j <= l - 1; ++j) {
    for (int m = 2; m <= j; ++m) {
      logc.push_back((j - m) * std::log(static_cast<double>(k)) +
                     std::log(static_cast<double>(k - 1)) +
                     std::log(static_cast<double>(k)));
      VectorXd row = VectorXd::Zero(n);
      for (int i = m - 2; i <= j - 2; ++i) row(i) -= kLn2;
      rows.push_back(row);
    }
  }
  LseTerms t;
  t.logc = Eigen::Map<VectorXd>(logc.data(), logc.size());
  t.a.resize(rows.size(), n);
  for (std::size_t i = 0; i < rows.size(); ++i) t.a.row(i) = rows[i];
  return t;
}

LseTerms echi_lse(int k, int l) {
  const int n = l - 1;
  std::vector<double> logc;
  std::vector<VectorXd> rows;
  for (int m = 2; m <= l; ++m) {
    logc.push_back((l - m) * std::log(static_cast<double>(k)) +
                   std::log(static_cast<double>(k - 1)));
    VectorXd row = VectorXd::Zero(n);
    for (int i = m - 2; i <= l - 2; ++i) row(i) -= kLn2;
    rows.push_back(row);
  }
  LseTerms t;
  t.logc = Eigen::Map<VectorXd>(logc.data(), logc.size());
  t.a.resize(rows.size(), n);
  for (std::size_t i = 0; i < rows.size(); ++i) t.a.row(i) = rows[i];
  return t;
}

std::pair<double, VectorXd> lse_eval(const LseTerms& t, const VectorXd& a) {
  const VectorXd z = t.logc + t.a * a;
  const double zm = z.maxCoeff();
  const VectorXd w = (z.array() - zm).exp();
  const double s = w.sum();
  return {zm + std::log(s), t.a.transpose() * (w / s)};
}

// Euclidean projection onto {lo <= y <= hi, sum y = s} by bisection on the
// common shift.
VectorXd project_box_simplex(const VectorXd& x, double lo, double hi,
                             double s) {
  const auto clipped_sum = [&](double t) {
    return x.array().min(hi - t).max(lo - t).sum() + t * x.size();
  };
  double a = -2.0 * (hi - lo) * x.size() - std::abs(s);
  double b = 2.0 * (hi - lo) * x.size() + std::abs(s);
  for (int i = 0; i < 200; ++i) {
    const double m = 0.5 * (a + b);
    if (clipped_sum(m) > s)
      b = m;
    else
      a = m;
  }
  const double t = 0.5 * (a + b);
  return (x.array() + t).min(hi).max(lo);
}

VectorXd back_loaded(int l, int j, int budget) {
  const int n = l - 1;
  VectorXd back = VectorXd::Zero(n);
  int rem = budget;
  for (int i = n - 1; i >= 0; --i) {
    back(i) = std::min(j, rem);
    rem -= static_cast<int>(back(i));
  }
  return back;
}

// Barrier + projected gradient on the relaxed program; returns the
// continuous optimum. Caller has already verified feasibility.
VectorXd solve_relaxed(int k, int l, int j, int budget, double p_th,
                       int iters = 3000) {
  const int n = l - 1;
  const LseTerms ft = xi_lse(k, l);
  const LseTerms et = echi_lse(k, l);
  const double lpth = std::log(p_th);
  const VectorXd back = back_loaded(l, j, budget);

  VectorXd a = VectorXd::Constant(n, static_cast<double>(budget) / n);
  if (lse_eval(et, a).first >= lpth) {
    double lo = 0.0, hi = 1.0;
    for (int i = 0; i < 60; ++i) {
      const double mid = 0.5 * (lo + hi);
      if (lse_eval(et, mid * a + (1.0 - mid) * back).first < lpth)
        lo = mid;
      else
        hi = mid;
    }
    a = lo * a + (1.0 - lo) * back;
    a = 0.9 * a + 0.1 * back;
  }

  for (const double mu : {1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6}) {
    for (int it = 0; it < iters / 6; ++it) {
      const auto [fv, fg] = lse_eval(ft, a);
      const auto [ev, eg] = lse_eval(et, a);
      const double slack = lpth - ev;
      const VectorXd g = fg + (mu / std::max(slack, 1e-14)) * eg;
      const double cur = fv - mu * std::log(std::max(slack, 1e-300));
      double step = 1.0 / (g.norm() + 1e-12);
      bool moved = false;
      VectorXd cand;
      for (int bt = 0; bt < 50; ++bt) {
        cand = project_box_simplex(a - step * g, 0.0, j, budget);
        const double ecand = lse_eval(et, cand).first;
        if (ecand < lpth) {
          const double fcand = lse_eval(ft, cand).first;
          if (fcand - mu * std::log(lpth - ecand) <= cur + 1e-14) {
            moved = true;
            break;
          }
        }
        step *= 0.5;
      }
      if (!moved) break;
      const bool converged = (cand - a).norm() < 1e-11;
      a = cand;
      if (converged) break;
    }
  }
  return a;
}

// Nearest-integer rounding with budget repair (largest residuals first) and
// constraint repair (move units from the earliest to the latest slot).
std::optional<std::vector<int>> round_repair(const VectorXd& a_rel, int k,
                                             int l, int j, int budget,
                                             double p_th) {
  const int n = l - 1;
  std::vector<int> a(n);
  VectorXd resid(n);
  for (int i = 0; i < n; ++i) {
    const double r = std::nearbyint(a_rel(i));
    resid(i) = a_rel(i) - r;
    a[i] = std::clamp(static_cast<int>(r), 0, j);
  }
  int m = budget - std::accumulate(a.begin(), a.end(), 0);
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  if (m > 0) {
    std::stable_sort(idx.begin(), idx.end(),
                     [&resid](int x, int y) { return resid(x) > resid(y); });
  } else {
    std::stable_sort(idx.begin(), idx.end(),
                     [&resid](int x, int y) { return resid(x) < resid(y); });
  }
  for (std::size_t i = 0; m != 0 && i < idx.size(); ++i) {
    const int t = idx[i];
    if (m > 0 && a[t] < j) {
      ++a[t];
      --m;
    } else if (m < 0 && a[t] > 0) {
      --a[t];
      ++m;
    }
  }
  if (m != 0) return std::nullopt;

  const auto e_chi = [&](const std::vector<int>& v) {
    std::vector<double> tau(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) tau[i] = std::pow(2.0, -v[i]);
    return expected_survivors(k, l, tau);
  };
  int guard = 0;
  while (e_chi(a) > p_th && guard < 10 * l * j) {
    ++guard;
    int src = -1, dst = -1;
    for (int i = 0; i < n; ++i) {
      if (a[i] > 0) {
        src = i;
        break;
      }
    }
    for (int i = n - 1; i >= 0; --i) {
      if (a[i] < j && i != src) {
        dst = i;
        break;
      }
    }
    if (src < 0 || dst < 0 || src >= dst) return std::nullopt;
    --a[src];
    ++a[dst];
  }
  if (e_chi(a) > p_th) return std::nullopt;
  return a;
}

// Greedy one-swap descent: move single parity bits between slots while the
// move strictly lowers Xi and keeps E[chi_L] within budget. Rounded GP
// solutions occasionally land one lattice step off the integer optimum; this
// walks the remaining distance and makes the result swap-locally optimal.
std::vector<int> polish_swaps(std::vector<int> a, int k, int l, int j,
                              double p_th) {
  const int n = static_cast<int>(a.size());
  double best_xi = evaluate_allocation(a, k, l).first;
  bool improved = true;
  int guard = 0;
  while (improved && guard++ < 4 * l * j) {
    improved = false;
    for (int s = 0; s < n; ++s) {
      for (int d = 0; d < n; ++d) {
        if (s == d || a[s] == 0 || a[d] >= j) continue;
        --a[s];
        ++a[d];
        const auto [xi, e_chi] = evaluate_allocation(a, k, l);
        if (e_chi <= p_th && xi < best_xi - 1e-12) {
          best_xi = xi;
          improved = true;
        } else {
          ++a[s];
          --a[d];
        }
      }
    }
  }
  return a;
}

void validate_inputs(int k, int l, int j, int b, double p_th) {
  if (k < 1) throw ConfigError("length optimizer: K must be >= 1");
  if (l < 2) throw ConfigError("length optimizer: L must be >= 2");
  if (j < 1) throw ConfigError("length optimizer: J must be >= 1");
  if (p_th < 0.0 || !std::isfinite(p_th))
    throw ConfigError("length optimizer: p_th must be a finite nonnegative value");
  const int budget = l * j - b;
  if (b < 1 || budget < 0)
    throw ConfigError("length optimizer: need 1 <= b <= L*J");
  if (budget > j * (l - 1))
    throw ConfigError("length optimizer: parity budget exceeds C1 capacity");
}

LengthAllocation finish(const std::vector<int>& a, const VectorXd& a_rel,
                        int k, int l, double p_th, bool best_effort,
                        double min_e_chi) {
  LengthAllocation out;
  out.a = a;
  out.a_relaxed.assign(a_rel.data(), a_rel.data() + a_rel.size());
  std::tie(out.xi, out.e_chi) = evaluate_allocation(a, k, l);
  if (k >= 2) {
    const LseTerms ft = xi_lse(k, l);
    const LseTerms et = echi_lse(k, l);
    out.xi_relaxed = std::exp(lse_eval(ft, a_rel).first);
    out.e_chi_relaxed = std::exp(lse_eval(et, a_rel).first);
  } else {
    // With a single list entry no wrong path ever survives a parity check,
    // so E[chi_L] = 0 and the complexity is the constant K(L-1) term.
    out.xi_relaxed = out.xi;
    out.e_chi_relaxed = 0.0;
  }
  out.p_th = p_th;
  out.feasible = out.e_chi <= p_th;
  out.best_effort = best_effort;
  out.min_attainable_e_chi = min_e_chi;
  return out;
}

}  // namespace

std::pair<double, double> evaluate_allocation(const std::vector<int>& a_tail,
                                              int k, int l) {
  std::vector<double> tau(a_tail.size());
  for (std::size_t i = 0; i < a_tail.size(); ++i) {
    if (a_tail[i] < 0)
      throw ConfigError("evaluate_allocation: parity lengths must be >= 0");
    tau[i] = std::pow(2.0, -a_tail[i]);
  }
  return {decoding_complexity(k, l, a_tail),
          expected_survivors(k, l, tau)};
}

LengthAllocation optimize_lengths(int k, int l, int j, int b, double p_th,
                                  bool relax) {
  validate_inputs(k, l, j, b, p_th);
  const int budget = l * j - b;
  const VectorXd back = back_loaded(l, j, budget);
  std::vector<int> back_int(back.size());
  for (int i = 0; i < back.size(); ++i)
    back_int[i] = static_cast<int>(back(i));
  const double min_e_chi = evaluate_allocation(back_int, k, l).second;

  if (min_e_chi > p_th) {
    if (!relax) {
      char msg[160];
      std::snprintf(msg, sizeof msg,
                    "optimize_lengths: E[chi_L] <= %.6g unattainable; "
                    "minimum attainable is %.6g",
                    p_th, min_e_chi);
      throw ConfigError(msg);
    }
    return finish(back_int, back, k, l, p_th, true, min_e_chi);
  }
  if (k < 2) return finish(back_int, back, k, l, p_th, false, min_e_chi);

  const VectorXd a_rel = solve_relaxed(k, l, j, budget, p_th);
  const auto rounded = round_repair(a_rel, k, l, j, budget, p_th);
  // The back-loaded allocation is integral and feasible, so a failed repair
  // still has a valid (if conservative) fallback.
  const std::vector<int>& a = rounded ? *rounded : back_int;
  return finish(polish_swaps(a, k, l, j, p_th), a_rel, k, l, p_th, false,
                min_e_chi);
}

LengthAllocation exhaustive_oracle(int k, int l, int j, int b, double p_th,
                                   bool relax) {
  validate_inputs(k, l, j, b, p_th);
  const int n = l - 1;
  if (std::pow(static_cast<double>(j + 1), n) > 1e7)
    throw ConfigError(
        "exhaustive_oracle: search space too large, use optimize_lengths");
  const int budget = l * j - b;
  const VectorXd back = back_loaded(l, j, budget);
  std::vector<int> back_int(back.size());
  for (int i = 0; i < back.size(); ++i)
    back_int[i] = static_cast<int>(back(i));
  const double min_e_chi = evaluate_allocation(back_int, k, l).second;

  std::vector<int> cur(n, 0);
  std::optional<std::vector<int>> best;
  double best_xi = 0.0;
  const auto rec = [&](auto&& self, int i, int rem) -> void {
    if (i == n - 1) {
      if (rem < 0 || rem > j) return;
      cur[i] = rem;
      const auto [xi, e] = evaluate_allocation(cur, k, l);
      if (e <= p_th && (!best || xi < best_xi)) {
        best = cur;
        best_xi = xi;
      }
      return;
    }
    const int lo = std::max(0, rem - j * (n - 1 - i));
    const int hi = std::min(j, rem);
    for (int x = lo; x <= hi; ++x) {
      cur[i] = x;
      self(self, i + 1, rem - x);
    }
  };
  rec(rec, 0, budget);

  if (!best) {
    if (!relax) {
      char msg[160];
      std::snprintf(msg, sizeof msg,
                    "exhaustive_oracle: E[chi_L] <= %.6g unattainable; "
                    "minimum attainable is %.6g",
                    p_th, min_e_chi);
      throw ConfigError(msg);
    }
    return finish(back_int, back, k, l, p_th, true, min_e_chi);
  }
  VectorXd best_real(n);
  for (int i = 0; i < n; ++i) best_real(i) = (*best)[i];
  return finish(*best, best_real, k, l, p_th, false, min_e_chi);
}

}  // namespace ura
