#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "ura/codebook.hpp"
#include "ura/inner_detector.hpp"

namespace ura {

// Fisher Information Matrix of gamma-tilde evaluated at the true value:
//   F_ij = M |B_ij|^2 + 2 Re(B_ij (G~ G~^H)_ji),  B = C^H Sigma~^-1 C,
// with Sigma~ built at gamma_tilde_true. Real symmetric. Throws
// NumericalError if Sigma~ fails to factorize.
Eigen::MatrixXd fisher_matrix(const Eigen::VectorXd& gamma_tilde_true,
                              const Codebook& cb,
                              const EffectiveChannelModel& model,
                              double sigma2, int m);

struct PredictedErrors {
  Eigen::VectorXd variance;  // diag(F^-1), per-coordinate asymptotic variance
  Eigen::MatrixXd f_inv;
  bool regularized = false;            // ridge was needed before inversion
  std::vector<int> weak_coordinates;   // near-null diagonal entries
};

// Inverts F, adding the ridge 1e-10 * tr(F)/2^J when plain factorization
// fails (sparse gamma-tilde leaves inactive coordinates nearly
// uninformative). Throws NumericalError, naming the worst coordinate, if F
// stays singular past the ridge.
PredictedErrors predicted_error_distribution(const Eigen::MatrixXd& f);

// Paired Monte Carlo estimation errors of detect() under the detector's own
// signal model: each trial draws Y with column mean C diag(gamma*) G~ and
// column covariance Sigma~(gamma*) and runs both detector modes on the same
// block. Errors are rows of gamma_hat - gamma*.
struct ErrorSample {
  int trials = 0;
  Eigen::MatrixXd errors_proposed;  // trials x 2^J
  Eigen::MatrixXd errors_baseline;
  Eigen::VectorXd mean_proposed, var_proposed;
  Eigen::VectorXd mean_baseline, var_baseline;
  int proposed_wins = 0;  // coordinates where proposed variance is smaller
};

ErrorSample collect_error_samples(const Codebook& cb,
                                  const EffectiveChannelModel& model,
                                  const Eigen::VectorXd& gamma_tilde_true,
                                  double sigma2, int m, int trials,
                                  const DetectorOptions& opts,
                                  std::uint64_t seed);

// CSV exports: per-arm sample files (columns coordinate,error), a histogram
// file (arm,coordinate,bin_left,bin_right,count) and a 2-D scatter of the
// two largest-gamma coordinates (arm,error_x,error_y).
void write_error_samples_csv(const ErrorSample& sample,
                             const std::string& dir);
void write_error_histogram_csv(const ErrorSample& sample, int bins,
                               const std::string& path);
void write_error_scatter_csv(const ErrorSample& sample,
                             const Eigen::VectorXd& gamma_tilde_true,
                             const std::string& path);

// JSON summary: per-coordinate predicted vs. empirical variance plus which
// arm won each coordinate.
void write_error_summary_json(const ErrorSample& sample,
                              const Eigen::VectorXd& predicted_variance,
                              const std::string& path);

}  // namespace ura
