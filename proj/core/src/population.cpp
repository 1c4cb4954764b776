#include "ura/population.hpp"

#include <cmath>
#include <complex>

#include "ura/errors.hpp"

namespace ura {

Eigen::VectorXcd steering(int m, double theta) {
  Eigen::VectorXcd v(m);
  const double s = std::sin(theta);
  for (int i = 0; i < m; ++i) {
    const double phase = M_PI * static_cast<double>(i) * s;
    v(i) = std::complex<double>(std::cos(phase), std::sin(phase));
  }
  return v;
}

Population build_population(int k_tot, int m, double d_max, BetaMode mode,
                            Rng& rng, std::optional<double> kappa_fixed) {
  if (k_tot <= 0) throw ConfigError("build_population: k_tot must be positive");
  if (m <= 0) throw ConfigError("build_population: m must be positive");
  if (d_max <= 0.0) throw ConfigError("build_population: d_max must be positive");

  Population pop;
  pop.m = m;
  pop.mode = mode;
  pop.ues.resize(k_tot);

  // 1 - uniform() lies in (0, 1], keeping d strictly positive so the
  // db-normalized pathloss never divides by zero.
  for (int k = 0; k < k_tot; ++k) {
    pop.ues[k].d = d_max * (1.0 - rng.uniform());
  }
  for (int k = 0; k < k_tot; ++k) {
    UeProfile& ue = pop.ues[k];
    ue.kappa = kappa_fixed ? *kappa_fixed
                           : std::pow(10.0, 1.3 - 0.003 * ue.d);
    ue.alpha = 1.0 / (ue.kappa + 1.0);
    ue.beta = (mode == BetaMode::kUnit)
                  ? 1.0
                  : std::pow(d_max / ue.d, 3.5);
    const double theta = rng.uniform(0.0, 2.0 * M_PI);
    ue.g = std::sqrt(ue.kappa / (ue.kappa + 1.0)) * steering(m, theta);
  }
  return pop;
}

Population build_population(const SystemConfig& cfg, BetaMode mode, Rng& rng,
                            std::optional<double> kappa_fixed) {
  return build_population(cfg.k_tot, cfg.m, cfg.d_max, mode, rng, kappa_fixed);
}

ChannelDraw draw_channel(const Population& pop, int k_a, Rng& rng) {
  const int k_tot = pop.size();
  if (k_a < 0 || k_a > k_tot)
    throw ConfigError("draw_channel: k_a must be in [0, k_tot]");

  ChannelDraw draw;
  draw.active_set = rng.sample_without_replacement(k_tot, k_a);
  draw.h.resize(k_tot, pop.m);
  for (int k = 0; k < k_tot; ++k) {
    const UeProfile& ue = pop.ues[k];
    const double scale = std::sqrt(ue.alpha);
    for (int i = 0; i < pop.m; ++i) {
      draw.h(k, i) = ue.g(i) + scale * rng.cnormal();
    }
  }
  return draw;
}

}  // namespace ura
