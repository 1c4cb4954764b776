#include "ura/inner_detector.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ura/errors.hpp"

namespace ura {
namespace {

using Eigen::MatrixXcd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

double log_det_llt(const Eigen::LLT<MatrixXcd>& llt) {
  double ld = 0.0;
  const auto& l = llt.matrixLLT();
  for (int i = 0; i < l.rows(); ++i) ld += std::log(l(i, i).real());
  return 2.0 * ld;
}

Eigen::LLT<MatrixXcd> factorize_sigma(const MatrixXcd& c,
                                      const VectorXd& gamma, double sigma2) {
  const int n0 = static_cast<int>(c.rows());
  MatrixXcd sigma = (c * gamma.asDiagonal()) * c.adjoint();
  sigma += sigma2 * MatrixXcd::Identity(n0, n0);
  Eigen::LLT<MatrixXcd> llt(sigma);
  if (llt.info() != Eigen::Success)
    throw NumericalError("Sigma-tilde is not positive definite");
  return llt;
}

// p(gamma) = log|Sigma~| + tr(Sigma~^-1 Sigma^)
double p_term(const Eigen::LLT<MatrixXcd>& llt, const MatrixXcd& shat) {
  return log_det_llt(llt) + llt.solve(shat).trace().real();
}

// q(gamma) with E = C diag(gamma) G~
double q_term(const Eigen::LLT<MatrixXcd>& llt, const MatrixXcd& c,
              const MatrixXcd& g_tilde, const MatrixXcd& y,
              const VectorXd& gamma) {
  const double m = static_cast<double>(y.cols());
  const MatrixXcd e = (c * gamma.asDiagonal()) * g_tilde;
  const MatrixXcd v = llt.solve(e);
  const double t1 = e.conjugate().cwiseProduct(v).sum().real();
  const double t2 = y.conjugate().cwiseProduct(v).sum().real();
  return (t1 - 2.0 * t2) / m;
}

VectorXd grad_q_impl(const MatrixXcd& c, const MatrixXcd& y,
                     const MatrixXcd& g_tilde, const MatrixXcd& w,
                     const VectorXd& gamma) {
  const double m = static_cast<double>(y.cols());
  const MatrixXcd wc = w * c;                  // Sigma~^-1 C
  const MatrixXcd b = c.adjoint() * wc;        // B, Hermitian
  const MatrixXcd gg = g_tilde * g_tilde.adjoint();
  const MatrixXcd p = b * gamma.asDiagonal();  // P = B Gamma~
  const MatrixXcd t45 = g_tilde * (y.adjoint() * wc);

  // Diagonals of the five Theta products without forming them:
  //   diag(Theta1) = rowsum(P .* GG^T), diag(Theta3) = conj(diag(Theta1)),
  //   diag(Theta2) = rowsum((P GG) .* conj(P)),
  //   diag(Theta4) = rowsum(P .* T45^T), diag(Theta5) = diag(T45).
  const VectorXcd d1 = p.cwiseProduct(gg.transpose()).rowwise().sum();
  const VectorXcd d2 =
      (p * gg).cwiseProduct(p.conjugate()).rowwise().sum();
  const VectorXcd d3 = d1.conjugate();
  const VectorXcd d4 = p.cwiseProduct(t45.transpose()).rowwise().sum();
  const VectorXcd d5 = t45.diagonal();

  const VectorXcd g =
      (d1 - d2 + d3) / m - (2.0 / m) * (d5 - d4);
  VectorXd out = g.real();
  if (!out.allFinite())
    throw NumericalError("grad_q produced a non-finite component");
  return out;
}

}  // namespace

DetectorState::DetectorState(const MatrixXcd& c, const MatrixXcd& y,
                             double sigma2)
    : c_(&c), sigma2_(sigma2) {
  if (c.rows() != y.rows())
    throw ConfigError("DetectorState: C and Y row counts differ");
  if (sigma2 <= 0.0) throw ConfigError("DetectorState: sigma2 must be positive");
  const int n0 = static_cast<int>(c.rows());
  gamma_ = VectorXd::Zero(c.cols());
  shat_ = (y * y.adjoint()) / static_cast<double>(y.cols());
  sigma_ = sigma2 * MatrixXcd::Identity(n0, n0);
  w_ = (1.0 / sigma2) * MatrixXcd::Identity(n0, n0);
}

double DetectorState::n1(int r) const {
  const VectorXcd w = w_ * c_->col(r);
  return c_->col(r).dot(w).real();
}

double DetectorState::n2(int r) const {
  const VectorXcd w = w_ * c_->col(r);
  return w.dot(shat_ * w).real();
}

void DetectorState::apply_update(int r, double d) {
  const VectorXcd w = w_ * c_->col(r);
  apply_update(r, d, w, c_->col(r).dot(w).real());
}

void DetectorState::apply_update(int r, double d, const VectorXcd& w,
                                 double n1) {
  if (d < -gamma_(r) - 1e-9)
    throw NumericalError("apply_update: step would make gamma negative");
  const double denom = 1.0 + d * n1;
  if (denom <= 1e-12)
    throw NumericalError("apply_update: update would lose positive definiteness");
  gamma_(r) = std::max(0.0, gamma_(r) + d);
  sigma_.noalias() += d * (c_->col(r) * c_->col(r).adjoint());
  w_.noalias() -= (d / denom) * (w * w.adjoint());
}

void DetectorState::refresh() {
  const int n0 = static_cast<int>(c_->rows());
  sigma_ = (*c_ * gamma_.asDiagonal()) * c_->adjoint();
  sigma_ += sigma2_ * MatrixXcd::Identity(n0, n0);
  Eigen::LLT<MatrixXcd> llt(sigma_);
  if (llt.info() != Eigen::Success)
    throw NumericalError("refresh: Sigma-tilde is not positive definite");
  w_ = llt.solve(MatrixXcd::Identity(n0, n0));
}

double detector_objective(const MatrixXcd& c, const MatrixXcd& y,
                          const EffectiveChannelModel& model, double sigma2,
                          const VectorXd& gamma, DetectorMode mode) {
  const auto llt = factorize_sigma(c, gamma, sigma2);
  const MatrixXcd shat = (y * y.adjoint()) / static_cast<double>(y.cols());
  double v = p_term(llt, shat);
  if (mode == DetectorMode::kNonzeroMean)
    v += q_term(llt, c, model.g_tilde, y, gamma);
  if (!std::isfinite(v))
    throw NumericalError("objective is not finite");
  return v;
}

double detector_objective_linearized(const MatrixXcd& c, const MatrixXcd& y,
                                     const EffectiveChannelModel& model,
                                     double sigma2, const VectorXd& gamma,
                                     const VectorXd& anchor) {
  const auto llt = factorize_sigma(c, gamma, sigma2);
  const MatrixXcd shat = (y * y.adjoint()) / static_cast<double>(y.cols());
  const auto llt_anchor = factorize_sigma(c, anchor, sigma2);
  const double q0 = q_term(llt_anchor, c, model.g_tilde, y, anchor);
  const VectorXd gq = detector_grad_q(c, y, model, sigma2, anchor);
  const double v = p_term(llt, shat) + q0 + gq.dot(gamma - anchor);
  if (!std::isfinite(v))
    throw NumericalError("linearized objective is not finite");
  return v;
}

VectorXd detector_grad_q(const MatrixXcd& c, const MatrixXcd& y,
                         const EffectiveChannelModel& model, double sigma2,
                         const VectorXd& gamma) {
  const auto llt = factorize_sigma(c, gamma, sigma2);
  const int n0 = static_cast<int>(c.rows());
  const MatrixXcd w = llt.solve(MatrixXcd::Identity(n0, n0));
  return grad_q_impl(c, y, model.g_tilde, w, gamma);
}

CoordinateStep coordinate_update(double n1, double n2, double n3,
                                 double gamma_r) {
  if (n1 <= 0.0)
    throw NumericalError("coordinate_update: n1 must be positive");
  CoordinateStep step;
  step.n1 = n1;
  step.n2 = n2;
  step.n3 = n3;
  double d;
  if (std::abs(n3) < 1e-12) {
    d = n2 / (n1 * n1) - 1.0 / n1;
    step.branch = CoordinateBranch::kDegenerateN3;
  } else {
    const double disc = n1 * n1 * (n1 * n1 - 4.0 * n2 * n3);
    if (disc < 0.0) {
      if (n1 - n2 - n3 > 0.0) {
        // s_r'(0) > 0 and no stationary point: descend to the boundary.
        d = -gamma_r;
        step.branch = CoordinateBranch::kBoundary;
      } else {
        // Descent direction unbounded below; fall back to the zero-mean
        // minimizer, which the surrogate guard then accepts or rejects.
        d = n2 / (n1 * n1) - 1.0 / n1;
        step.branch = CoordinateBranch::kCompletion;
      }
    } else {
      d = ((n1 * n1 - 2.0 * n1 * n3) - std::sqrt(disc)) /
          (2.0 * n1 * n1 * n3);
      step.branch = CoordinateBranch::kRegular;
    }
  }
  step.d = std::max(d, -gamma_r);
  return step;
}

CoordinateStep coordinate_update(const DetectorState& state, int r,
                                 const VectorXd& grad_q_anchor) {
  const VectorXcd w = state.sigma_tilde_inv() * state.c().col(r);
  const double n1 = state.c().col(r).dot(w).real();
  const double n2 = w.dot(state.sigma_hat() * w).real();
  return coordinate_update(n1, n2, -grad_q_anchor(r), state.gamma()(r));
}

double surrogate_change(double d, double n1, double n2, double n3) {
  const double dn1 = d * n1;
  return std::log1p(dn1) - d * n2 / (1.0 + dn1) - n3 * d;
}

DetectorResult detect(const MatrixXcd& y, const Codebook& cb,
                      const EffectiveChannelModel& model, double sigma2,
                      const DetectorOptions& opts, Rng& rng) {
  const MatrixXcd& c = cb.c;
  const int n = static_cast<int>(c.cols());
  const int t_max = opts.t_max > 0 ? opts.t_max : 2 * n;
  const int refresh_every = opts.refresh_every > 0 ? opts.refresh_every : n;
  const bool zero_mean = opts.mode == DetectorMode::kZeroMeanBaseline;
  if (!zero_mean &&
      (model.g_tilde.rows() != n || model.g_tilde.cols() != y.cols()))
    throw ConfigError("detect: G-tilde shape mismatch");

  DetectorState state(c, y, sigma2);
  DetectorResult res;
  res.trace.push_back(
      detector_objective(c, y, model, sigma2, state.gamma(), opts.mode));

  long long n_upd = 0;
  VectorXcd w(c.rows());
  for (int i = 0; i < opts.i_max; ++i) {
    res.iterations = i + 1;
    const VectorXd gq =
        zero_mean ? VectorXd::Zero(n)
                  : grad_q_impl(c, y, model.g_tilde, state.sigma_tilde_inv(),
                                state.gamma());
    const VectorXd gamma_snap = state.gamma();

    for (int t = 0; t < t_max; ++t) {
      const int r = static_cast<int>(rng.uniform_below(n));
      w.noalias() = state.sigma_tilde_inv() * c.col(r);
      const double n1 = c.col(r).dot(w).real();
      const double n2 = w.dot(state.sigma_hat() * w).real();
      const double n3 = -gq(r);
      const CoordinateStep step =
          coordinate_update(n1, n2, n3, state.gamma()(r));
      if (step.branch == CoordinateBranch::kCompletion)
        ++res.stats.unbounded_steps;
      const double d = step.d;
      if (d == 0.0) continue;
      const double sd = surrogate_change(d, n1, n2, n3);
      if (sd > 1e-12) {
        ++res.stats.rejected_guard;
        continue;
      }
      if (1.0 + d * n1 <= 1e-12) {
        ++res.stats.skipped_denominator;
        continue;
      }
      state.apply_update(r, d, w, n1);
      ++res.stats.accepted;
      if (++n_upd % refresh_every == 0) state.refresh();
    }

    const double t_new =
        detector_objective(c, y, model, sigma2, state.gamma(), opts.mode);
    const double delta = res.trace.back() - t_new;
    if (delta < 0.0) {
      // The linearized inner loop overshot; keep the previous iterate.
      ++res.stats.reverts;
      res.gamma = gamma_snap;
      res.converged = true;
      return res;
    }
    res.trace.push_back(t_new);
    if (delta <= opts.eps) {
      res.converged = true;
      break;
    }
  }
  res.gamma = state.gamma();
  return res;
}

std::vector<int> select_support(const VectorXd& gamma_hat, int k_a_est,
                                int delta) {
  const int n = static_cast<int>(gamma_hat.size());
  const int k = k_a_est + delta;
  if (k < 0 || k > n)
    throw ConfigError("select_support: list size K exceeds codebook size");
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&gamma_hat](int a, int b) {
    return gamma_hat(a) > gamma_hat(b);
  });
  idx.resize(k);
  std::sort(idx.begin(), idx.end());
  return idx;
}

EffectiveChannelModel genie_effective_channel(
    const Population& pop, const std::vector<int>& active_set,
    const std::vector<std::uint32_t>& tx_index, int num_codewords) {
  if (active_set.size() != tx_index.size())
    throw ConfigError("genie_effective_channel: active/tx size mismatch");
  EffectiveChannelModel model;
  model.g_tilde = MatrixXcd::Zero(num_codewords, pop.m);
  model.r_diag = VectorXd::Zero(num_codewords);
  for (std::size_t i = 0; i < active_set.size(); ++i) {
    const UeProfile& ue = pop.ues.at(active_set[i]);
    const auto r = tx_index[i];
    if (static_cast<int>(r) >= num_codewords)
      throw ConfigError("genie_effective_channel: tx index out of range");
    model.g_tilde.row(r) += ue.g.transpose();
    model.r_diag(static_cast<int>(r)) += ue.alpha;
  }
  return model;
}

VectorXd genie_gamma_tilde(const Population& pop,
                           const std::vector<int>& active_set,
                           const std::vector<std::uint32_t>& tx_index,
                           int num_codewords) {
  if (active_set.size() != tx_index.size())
    throw ConfigError("genie_gamma_tilde: active/tx size mismatch");
  VectorXd gamma = VectorXd::Zero(num_codewords);
  VectorXd alpha_eff = VectorXd::Zero(num_codewords);
  for (std::size_t i = 0; i < active_set.size(); ++i) {
    const UeProfile& ue = pop.ues.at(active_set[i]);
    const int r = static_cast<int>(tx_index[i]);
    if (r >= num_codewords)
      throw ConfigError("genie_gamma_tilde: tx index out of range");
    gamma(r) += ue.beta;
    alpha_eff(r) += ue.alpha;
  }
  return gamma.cwiseProduct(alpha_eff);
}

EffectiveChannelModel prior_effective_channel(const Population& pop, int k_a,
                                              int num_codewords) {
  EffectiveChannelModel model;
  Eigen::VectorXcd mean_g = Eigen::VectorXcd::Zero(pop.m);
  double mean_alpha = 0.0;
  for (const UeProfile& ue : pop.ues) {
    mean_g += ue.g;
    mean_alpha += ue.alpha;
  }
  mean_g /= static_cast<double>(pop.size());
  mean_alpha /= static_cast<double>(pop.size());
  const double occupancy =
      static_cast<double>(k_a) / static_cast<double>(num_codewords);
  model.g_tilde = MatrixXcd::Zero(num_codewords, pop.m);
  model.g_tilde.rowwise() = (occupancy * mean_g).transpose();
  model.r_diag = VectorXd::Constant(num_codewords, mean_alpha);
  return model;
}

}  // namespace ura
