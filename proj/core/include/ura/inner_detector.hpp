#pragma once

#include <Eigen/Dense>
#include <vector>

#include "ura/codebook.hpp"
#include "ura/population.hpp"
#include "ura/rng.hpp"

namespace ura {

// Side information the detector holds about the effective channel H~:
// row r of g_tilde is the mean of codeword r's effective channel row and
// r_diag[r] its per-antenna scattered variance alpha'_r.
struct EffectiveChannelModel {
  Eigen::MatrixXcd g_tilde;  // 2^J x M
  Eigen::VectorXd r_diag;    // 2^J
};

enum class DetectorMode { kNonzeroMean, kZeroMeanBaseline };

struct DetectorOptions {
  int i_max = 20;          // max outer (CCCP) iterations
  double eps = 0.01;       // stop when the objective decrease drops to eps
  int t_max = 0;           // coordinate steps per outer iteration; 0 -> 2*2^J
  int refresh_every = 0;   // full inverse refresh cadence; 0 -> 2^J
  DetectorMode mode = DetectorMode::kNonzeroMean;
};

struct DetectorStats {
  long long accepted = 0;          // rank-1 updates applied
  long long rejected_guard = 0;    // steps refused by the surrogate guard
  long long skipped_denominator = 0;  // steps with 1 + d*n1 too small
  long long unbounded_steps = 0;   // negative-discriminant descent branches
  int reverts = 0;                 // outer iterations rolled back
};

struct DetectorResult {
  Eigen::VectorXd gamma;      // final gamma-tilde estimate
  std::vector<double> trace;  // objective at gamma=0 and after each kept outer iteration
  int iterations = 0;         // outer iterations run
  bool converged = false;
  DetectorStats stats;
};

// Mutable detector state: the iterate gamma-tilde together with Sigma-tilde,
// its incrementally maintained inverse W, and the empirical covariance
// Sigma-hat = Y Y^H / M.
class DetectorState {
 public:
  DetectorState(const Eigen::MatrixXcd& c, const Eigen::MatrixXcd& y,
                double sigma2);

  const Eigen::VectorXd& gamma() const { return gamma_; }
  const Eigen::MatrixXcd& sigma_tilde() const { return sigma_; }
  const Eigen::MatrixXcd& sigma_tilde_inv() const { return w_; }
  const Eigen::MatrixXcd& sigma_hat() const { return shat_; }
  const Eigen::MatrixXcd& c() const { return *c_; }
  double sigma2() const { return sigma2_; }

  double n1(int r) const;  // c_r^H W c_r
  double n2(int r) const;  // c_r^H W Sigma-hat W c_r

  // gamma_r += d, Sigma-tilde += d c_r c_r^H, and the Sherman-Morrison
  // update of W. Throws NumericalError when 1 + d*n1 <= 1e-12 (positive
  // definiteness would be lost) or when d < -gamma_r beyond tolerance.
  void apply_update(int r, double d);

  // Hot-loop variant with w = W c_r and n1 already in hand.
  void apply_update(int r, double d, const Eigen::VectorXcd& w, double n1);

  // Rebuilds Sigma-tilde from gamma and refreshes W by factorization.
  void refresh();

 private:
  const Eigen::MatrixXcd* c_;
  double sigma2_ = 1.0;
  Eigen::VectorXd gamma_;
  Eigen::MatrixXcd sigma_, w_, shat_;
};

// Plain objective p + q of the (approximated) negative log-likelihood scaled
// by 1/M, up to the constant n0*log(pi):
//   p = log|Sigma~| + tr(Sigma~^-1 Sigma^),
//   q = (1/M) tr(Sigma~^-1 E E^H) - (2/M) Re tr(Sigma~^-1 E Y^H),
// with E = C diag(gamma) G~. Zero-mean mode drops q. Throws NumericalError
// on a non-finite result.
double detector_objective(const Eigen::MatrixXcd& c, const Eigen::MatrixXcd& y,
                          const EffectiveChannelModel& model, double sigma2,
                          const Eigen::VectorXd& gamma,
                          DetectorMode mode = DetectorMode::kNonzeroMean);

// CCCP surrogate: p(gamma) + q(anchor) + grad_q(anchor)^T (gamma - anchor).
double detector_objective_linearized(const Eigen::MatrixXcd& c,
                                     const Eigen::MatrixXcd& y,
                                     const EffectiveChannelModel& model,
                                     double sigma2,
                                     const Eigen::VectorXd& gamma,
                                     const Eigen::VectorXd& anchor);

// Gradient of q at gamma (length 2^J), from the five-term diagonal form.
Eigen::VectorXd detector_grad_q(const Eigen::MatrixXcd& c,
                                const Eigen::MatrixXcd& y,
                                const EffectiveChannelModel& model,
                                double sigma2, const Eigen::VectorXd& gamma);

enum class CoordinateBranch {
  kRegular,          // closed-form root of the cubic stationarity condition
  kDegenerateN3,     // |n3| ~ 0: zero-mean update n2/n1^2 - 1/n1
  kBoundary,         // negative discriminant, descent unbounded: d = -gamma_r
  kCompletion        // negative discriminant, ascent at 0: zero-mean step
};

struct CoordinateStep {
  double d = 0.0;  // clamped step, d >= -gamma_r
  double n1 = 0.0;
  double n2 = 0.0;
  double n3 = 0.0;
  CoordinateBranch branch = CoordinateBranch::kRegular;
};

// Closed-form minimizer of the coordinate surrogate
//   s_r(d) = log(1 + d*n1) - d*n2/(1 + d*n1) - n3*d
// clamped to d >= -gamma_r. Throws NumericalError when n1 <= 0.
CoordinateStep coordinate_update(double n1, double n2, double n3,
                                 double gamma_r);

// Convenience wrapper computing n1, n2 from the state and n3 = -grad_q_r.
CoordinateStep coordinate_update(const DetectorState& state, int r,
                                 const Eigen::VectorXd& grad_q_anchor);

// s_r(d) - s_r(0); negative values improve the surrogate.
double surrogate_change(double d, double n1, double n2, double n3);

// Algorithm 1: CCCP outer loop with randomized coordinate descent inner
// loop. Coordinates are drawn uniformly with replacement from rng. The trace
// holds the plain objective at gamma = 0 and after every kept outer
// iteration and is monotone non-increasing; an outer iteration that fails to
// decrease it is rolled back.
DetectorResult detect(const Eigen::MatrixXcd& y, const Codebook& cb,
                      const EffectiveChannelModel& model, double sigma2,
                      const DetectorOptions& opts, Rng& rng);

// Indices (0-based, ascending) of the K = k_a_est + delta largest entries of
// gamma_hat; ties keep the lower index. Throws ConfigError if K exceeds the
// vector length.
std::vector<int> select_support(const Eigen::VectorXd& gamma_hat, int k_a_est,
                                int delta);

// Genie side information for one sub-slot: row r of g_tilde is the sum of
// g_k over UEs transmitting codeword r, r_diag the matching alpha_k sum.
// tx_index[i] is the codeword index (0-based) of active UE active_set[i].
EffectiveChannelModel genie_effective_channel(
    const Population& pop, const std::vector<int>& active_set,
    const std::vector<std::uint32_t>& tx_index, int num_codewords);

// True gamma-tilde for the same slot: gamma_r = sum beta_k over the
// colliders, scaled by the effective variance share alpha'_r.
Eigen::VectorXd genie_gamma_tilde(const Population& pop,
                                  const std::vector<int>& active_set,
                                  const std::vector<std::uint32_t>& tx_index,
                                  int num_codewords);

// Model-based side information when the assignment is unknown: every row is
// the population-mean LOS scaled by the expected occupancy K_a/2^J, and
// r_diag is the population-mean alpha.
EffectiveChannelModel prior_effective_channel(const Population& pop, int k_a,
                                              int num_codewords);

}  // namespace ura
