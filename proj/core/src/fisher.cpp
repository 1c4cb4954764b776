#include "ura/fisher.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "ura/errors.hpp"

namespace ura {
namespace {

using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXd;

MatrixXcd crandn_matrix(Rng& rng, int rows, int cols) {
  MatrixXcd z(rows, cols);
  for (int c = 0; c < cols; ++c)
    for (int r = 0; r < rows; ++r) z(r, c) = rng.cnormal();
  return z;
}

void fmt_double(std::string& out, double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out += buf;
}

}  // namespace

MatrixXd fisher_matrix(const VectorXd& gamma_tilde_true, const Codebook& cb,
                       const EffectiveChannelModel& model, double sigma2,
                       int m) {
  const MatrixXcd& c = cb.c;
  const int n0 = static_cast<int>(c.rows());
  if (gamma_tilde_true.size() != c.cols())
    throw ConfigError("fisher_matrix: gamma-tilde must have one entry per codeword");
  if (model.g_tilde.rows() != c.cols() || model.g_tilde.cols() != m)
    throw ConfigError("fisher_matrix: g_tilde must be 2^J x M");
  if (gamma_tilde_true.minCoeff() < 0.0)
    throw ConfigError("fisher_matrix: gamma-tilde must be nonnegative");
  MatrixXcd sigma = (c * gamma_tilde_true.asDiagonal()) * c.adjoint();
  sigma += sigma2 * MatrixXcd::Identity(n0, n0);
  Eigen::LLT<MatrixXcd> llt(sigma);
  if (llt.info() != Eigen::Success)
    throw NumericalError("fisher_matrix: Sigma-tilde is singular");
  const MatrixXcd w = llt.solve(MatrixXcd::Identity(n0, n0));
  const MatrixXcd b = c.adjoint() * (w * c);
  const MatrixXcd gg = model.g_tilde * model.g_tilde.adjoint();
  const MatrixXd f = static_cast<double>(m) * b.cwiseAbs2() +
                     2.0 * b.cwiseProduct(gg.transpose()).real();
  if (!f.allFinite()) throw NumericalError("fisher_matrix: non-finite entry");
  return f;
}

PredictedErrors predicted_error_distribution(const MatrixXd& f) {
  const int n = static_cast<int>(f.rows());
  PredictedErrors out;
  Eigen::LLT<MatrixXd> llt(f);
  if (llt.info() == Eigen::Success) {
    out.f_inv = llt.solve(MatrixXd::Identity(n, n));
  }
  if (llt.info() != Eigen::Success || !out.f_inv.allFinite() ||
      out.f_inv.diagonal().minCoeff() <= 0.0) {
    const double ridge = 1e-10 * f.trace() / static_cast<double>(n);
    const double max_diag = f.diagonal().maxCoeff();
    for (int r = 0; r < n; ++r) {
      if (f(r, r) < 1e-8 * max_diag) out.weak_coordinates.push_back(r);
    }
    MatrixXd fr = f + ridge * MatrixXd::Identity(n, n);
    Eigen::LLT<MatrixXd> llt2(fr);
    if (llt2.info() != Eigen::Success) {
      int worst = 0;
      f.diagonal().minCoeff(&worst);
      throw NumericalError(
          "predicted_error_distribution: F singular past the ridge, "
          "null-space coordinate " +
          std::to_string(worst));
    }
    out.f_inv = llt2.solve(MatrixXd::Identity(n, n));
    out.regularized = true;
  }
  out.variance = out.f_inv.diagonal();
  return out;
}

ErrorSample collect_error_samples(const Codebook& cb,
                                  const EffectiveChannelModel& model,
                                  const VectorXd& gamma_tilde_true,
                                  double sigma2, int m, int trials,
                                  const DetectorOptions& opts,
                                  std::uint64_t seed) {
  const MatrixXcd& c = cb.c;
  const int n0 = static_cast<int>(c.rows());
  const int n = static_cast<int>(c.cols());

  MatrixXcd sigma = (c * gamma_tilde_true.asDiagonal()) * c.adjoint();
  sigma += sigma2 * MatrixXcd::Identity(n0, n0);
  Eigen::LLT<MatrixXcd> llt(sigma);
  if (llt.info() != Eigen::Success)
    throw NumericalError("collect_error_samples: true Sigma-tilde singular");
  const MatrixXcd lch = llt.matrixL();
  const MatrixXcd e_mean = (c * gamma_tilde_true.asDiagonal()) * model.g_tilde;

  ErrorSample sample;
  sample.trials = trials;
  sample.errors_proposed.resize(trials, n);
  sample.errors_baseline.resize(trials, n);

  DetectorOptions prop = opts;
  prop.mode = DetectorMode::kNonzeroMean;
  DetectorOptions base = opts;
  base.mode = DetectorMode::kZeroMeanBaseline;

  for (int t = 0; t < trials; ++t) {
    Rng rng_y{seed, 99, static_cast<std::uint64_t>(t)};
    const MatrixXcd y = e_mean + lch * crandn_matrix(rng_y, n0, m);
    Rng rng_p{seed, 1, static_cast<std::uint64_t>(t)};
    Rng rng_b{seed, 1, static_cast<std::uint64_t>(t)};
    const DetectorResult rp = detect(y, cb, model, sigma2, prop, rng_p);
    const DetectorResult rb = detect(y, cb, model, sigma2, base, rng_b);
    sample.errors_proposed.row(t) = (rp.gamma - gamma_tilde_true).transpose();
    sample.errors_baseline.row(t) = (rb.gamma - gamma_tilde_true).transpose();
  }

  const auto stats = [trials](const MatrixXd& e, VectorXd& mean,
                              VectorXd& var) {
    mean = e.colwise().mean();
    var = (e.rowwise() - mean.transpose()).colwise().squaredNorm() /
          std::max(1.0, static_cast<double>(trials - 1));
  };
  stats(sample.errors_proposed, sample.mean_proposed, sample.var_proposed);
  stats(sample.errors_baseline, sample.mean_baseline, sample.var_baseline);
  for (int r = 0; r < n; ++r)
    if (sample.var_proposed(r) < sample.var_baseline(r)) ++sample.proposed_wins;
  return sample;
}

void write_error_samples_csv(const ErrorSample& sample,
                             const std::string& dir) {
  const auto dump = [&](const MatrixXd& e, const std::string& path) {
    std::string out = "coordinate,error\n";
    for (int t = 0; t < e.rows(); ++t) {
      for (int r = 0; r < e.cols(); ++r) {
        out += std::to_string(r);
        out += ',';
        fmt_double(out, e(t, r));
        out += '\n';
      }
    }
    std::ofstream f(path);
    if (!f) throw ConfigError("cannot write " + path);
    f << out;
  };
  dump(sample.errors_proposed, dir + "/errors_proposed.csv");
  dump(sample.errors_baseline, dir + "/errors_baseline.csv");
}

void write_error_histogram_csv(const ErrorSample& sample, int bins,
                               const std::string& path) {
  if (bins < 1) throw ConfigError("histogram needs at least one bin");
  std::string out = "arm,coordinate,bin_left,bin_right,count\n";
  const auto accumulate = [&](const MatrixXd& e, const char* arm) {
    for (int r = 0; r < e.cols(); ++r) {
      const double lo = e.col(r).minCoeff();
      const double hi = e.col(r).maxCoeff();
      const double width = (hi - lo) > 0 ? (hi - lo) / bins : 1.0;
      std::vector<long long> count(bins, 0);
      for (int t = 0; t < e.rows(); ++t) {
        int idx = static_cast<int>((e(t, r) - lo) / width);
        idx = std::clamp(idx, 0, bins - 1);
        ++count[idx];
      }
      for (int k = 0; k < bins; ++k) {
        out += arm;
        out += ',';
        out += std::to_string(r);
        out += ',';
        fmt_double(out, lo + k * width);
        out += ',';
        fmt_double(out, lo + (k + 1) * width);
        out += ',';
        out += std::to_string(count[k]);
        out += '\n';
      }
    }
  };
  accumulate(sample.errors_proposed, "proposed");
  accumulate(sample.errors_baseline, "baseline");
  std::ofstream f(path);
  if (!f) throw ConfigError("cannot write " + path);
  f << out;
}

void write_error_scatter_csv(const ErrorSample& sample,
                             const VectorXd& gamma_tilde_true,
                             const std::string& path) {
  // Scatter the two strongest coordinates, Fig. 5 style.
  int first = 0, second = 0;
  gamma_tilde_true.maxCoeff(&first);
  double best = -1.0;
  for (int r = 0; r < gamma_tilde_true.size(); ++r) {
    if (r != first && gamma_tilde_true(r) > best) {
      best = gamma_tilde_true(r);
      second = r;
    }
  }
  std::string out = "arm,error_x,error_y\n";
  const auto dump = [&](const MatrixXd& e, const char* arm) {
    for (int t = 0; t < e.rows(); ++t) {
      out += arm;
      out += ',';
      fmt_double(out, e(t, first));
      out += ',';
      fmt_double(out, e(t, second));
      out += '\n';
    }
  };
  dump(sample.errors_proposed, "proposed");
  dump(sample.errors_baseline, "baseline");
  std::ofstream f(path);
  if (!f) throw ConfigError("cannot write " + path);
  f << out;
}

void write_error_summary_json(const ErrorSample& sample,
                              const VectorXd& predicted_variance,
                              const std::string& path) {
  std::string out = "{\n";
  out += "  \"trials\": " + std::to_string(sample.trials) + ",\n";
  out += "  \"coordinates\": " +
         std::to_string(sample.mean_proposed.size()) + ",\n";
  out += "  \"proposed_wins\": " + std::to_string(sample.proposed_wins) +
         ",\n";
  out += "  \"per_coordinate\": [\n";
  for (int r = 0; r < sample.mean_proposed.size(); ++r) {
    out += "    {\"coordinate\": " + std::to_string(r) +
           ", \"predicted_variance\": ";
    fmt_double(out, r < predicted_variance.size() ? predicted_variance(r)
                                                  : 0.0);
    out += ", \"empirical_variance_proposed\": ";
    fmt_double(out, sample.var_proposed(r));
    out += ", \"empirical_variance_baseline\": ";
    fmt_double(out, sample.var_baseline(r));
    out += ", \"mean_proposed\": ";
    fmt_double(out, sample.mean_proposed(r));
    out += "}";
    if (r + 1 < sample.mean_proposed.size()) out += ",";
    out += "\n";
  }
  out += "  ]\n}\n";
  std::ofstream f(path);
  if (!f) throw ConfigError("cannot write " + path);
  f << out;
}

}  // namespace ura
