#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "ura/config.hpp"
#include "ura/rng.hpp"

namespace ura {

// Interpretation of the large-scale fading coefficient beta_k.
//
// kUnit:         beta_k = 1 for every UE. Default; all calibrated tests and
//                reference experiments use this mode.
// kDbNormalized: the 126 + 35*log10(d) dB pathloss, renormalized so the
//                cell-edge UE (d = d_max) has beta = 1, i.e.
//                beta_k = (d_max / d_k)^3.5.
enum class BetaMode { kUnit, kDbNormalized };

struct UeProfile {
  double d = 0.0;      // distance from the BS in meters
  double beta = 1.0;   // large-scale fading power gain
  double kappa = 0.0;  // Rician factor (linear)
  double alpha = 1.0;  // scattered-power share 1/(kappa+1)
  Eigen::VectorXcd g;  // LOS mean vector in C^M, ||g||^2 = M*kappa/(kappa+1)
};

struct Population {
  int m = 0;
  BetaMode mode = BetaMode::kUnit;
  std::vector<UeProfile> ues;

  int size() const { return static_cast<int>(ues.size()); }
};

// One coherence-block channel realization. Rows of h are drawn for every UE,
// active or not; inactive rows carry no signal and exist only so genie-aided
// diagnostics can look at them.
struct ChannelDraw {
  Eigen::MatrixXcd h;           // K_tot x M, row k is h_k
  std::vector<int> active_set;  // sorted active UE indices (0-based)
};

// Uniform-linear-array steering vector: entry m is exp(i*pi*m*sin(theta)),
// m = 0..M-1. Unit-modulus entries, so ||steering||^2 = M.
Eigen::VectorXcd steering(int m, double theta);

// Draws the UE population. Distances are uniform on (0, d_max]; the Rician
// factor follows kappa = 10^(1.3 - 0.003 d) unless kappa_fixed pins it;
// alpha = 1/(kappa+1); the LOS vector is sqrt(kappa/(kappa+1)) times a
// steering vector at a per-UE angle drawn uniformly on [0, 2*pi).
// All distances are drawn before any angle so the RNG stream layout is
// stable when only M changes.
Population build_population(int k_tot, int m, double d_max, BetaMode mode,
                            Rng& rng,
                            std::optional<double> kappa_fixed = std::nullopt);

Population build_population(const SystemConfig& cfg, BetaMode mode, Rng& rng,
                            std::optional<double> kappa_fixed = std::nullopt);

// Samples a uniform K_a-subset of UEs (without replacement, returned sorted)
// and draws h_k = g_k + sqrt(alpha_k) * w_k with w_k ~ CN(0, I_M) for every
// UE. The active set is sampled before any channel row.
ChannelDraw draw_channel(const Population& pop, int k_a, Rng& rng);

}  // namespace ura
