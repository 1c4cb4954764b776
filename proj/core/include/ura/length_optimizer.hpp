#pragma once

#include <utility>
#include <vector>

namespace ura {

// Parity-length allocation (a_2..a_L) with its complexity Xi and survivors
// bound E[chi_L]. The relaxed fields describe the continuous optimum before
// integer rounding.
struct LengthAllocation {
  std::vector<int> a;                // a_2..a_L
  std::vector<double> a_relaxed;     // continuous optimum, same layout
  double xi = 0.0;                   // exact integer-allocation complexity
  double e_chi = 0.0;                // exact integer-allocation E[chi_L]
  double xi_relaxed = 0.0;
  double e_chi_relaxed = 0.0;
  double p_th = 0.0;
  bool feasible = false;             // integer allocation meets E[chi_L] <= p_th
  bool best_effort = false;          // p_th unattainable, relax flag honored
  double min_attainable_e_chi = 0.0; // E[chi_L] of the fully back-loaded allocation
};

// (Xi, E[chi_L]) for an integer allocation; delegates to the outer-code
// formulas with tau_l = 2^{-a_l}.
std::pair<double, double> evaluate_allocation(const std::vector<int>& a_tail,
                                              int k, int l);

// Solves the geometric program: minimize Xi over a in [0,J]^{L-1} with
// sum a_l = L*J - b, subject to E[chi_L] <= p_th, by projected gradient on
// the log-sum-exp form with a log barrier; then rounds to integers and
// repairs the budget and the constraint. When even the fully back-loaded
// allocation violates the constraint the problem is infeasible: with
// relax = false a ConfigError reports the minimal attainable E[chi_L], with
// relax = true the back-loaded allocation is returned flagged best_effort.
LengthAllocation optimize_lengths(int k, int l, int j, int b, double p_th,
                                  bool relax = false);

// Ground truth by full enumeration of the (J+1)^(L-1) lattice (bounded to
// 1e7 nodes, ConfigError beyond). Ties in Xi keep the lexicographically
// smallest allocation. Infeasibility handled as in optimize_lengths.
LengthAllocation exhaustive_oracle(int k, int l, int j, int b, double p_th,
                                   bool relax = false);

}  // namespace ura
