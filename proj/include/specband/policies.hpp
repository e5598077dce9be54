#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

#include "specband/env.hpp"
#include "specband/rng.hpp"
#include "specband/spectral.hpp"

namespace specband {

// Incremental regularized least-squares state shared by the UCB policies:
// V_t = Lambda + sum_s x_s x_s^T, its inverse maintained by rank-one
// (Sherman-Morrison) updates, xty = sum_s r_s x_s, and
// alpha_hat = V_t^{-1} xty. Also tracks log(|V_t| / |Lambda|) incrementally.
//
// Every 128 updates the product V * V^{-1} is checked against identity; if
// drift exceeds 1e-6 the inverse is recomputed from scratch and the epoch
// counter bumps, which invalidates any cached widths derived from it.
class RlsState {
 public:
  explicit RlsState(const RegularizedSpectrum& spectrum)
      : v_mat_(spectrum.diag.asDiagonal()),
        v_inv_(spectrum.diag.cwiseInverse().asDiagonal()),
        xty_(Eigen::VectorXd::Zero(spectrum.dim())),
        alpha_hat_(Eigen::VectorXd::Zero(spectrum.dim())) {
    if (spectrum.dim() == 0)
      throw std::invalid_argument("rls state: empty spectrum");
    if (spectrum.diag.minCoeff() <= 0.0)
      throw std::invalid_argument("rls state: spectrum must be positive");
  }

  int dim() const { return static_cast<int>(xty_.size()); }
  long long num_updates() const { return updates_; }
  long long reinversion_epoch() const { return epoch_; }
  const Eigen::MatrixXd& v_mat() const { return v_mat_; }
  const Eigen::MatrixXd& v_inv() const { return v_inv_; }
  const Eigen::VectorXd& xty() const { return xty_; }
  const Eigen::VectorXd& alpha_hat() const { return alpha_hat_; }
  double log_det_ratio() const { return log_det_ratio_; }

  // ||x||_{V^{-1}} = sqrt(x^T V^{-1} x); the confidence width up to the
  // coefficient c, which the caller applies.
  double width(const Eigen::VectorXd& x) const {
    return std::sqrt(std::max(0.0, x.dot(v_inv_ * x)));
  }

  void update(const Eigen::VectorXd& x, double reward) {
    if (x.size() != xty_.size())
      throw std::invalid_argument("rls update: dimension mismatch");
    if (x.squaredNorm() > 1.0 + 1e-9)
      throw std::invalid_argument("rls update: feature norm exceeds 1");
    const Eigen::VectorXd w = v_inv_ * x;
    const double denom = 1.0 + x.dot(w);  // >= 1 since V^{-1} is PD
    log_det_ratio_ += std::log(denom);
    v_inv_.noalias() -= (w / denom) * w.transpose();
    v_mat_.noalias() += x * x.transpose();
    xty_.noalias() += reward * x;
    ++updates_;
    if (updates_ % 128 == 0) reinvert_if_drifted();
    alpha_hat_.noalias() = v_inv_ * xty_;
  }

 private:
  void reinvert_if_drifted() {
    const int n = dim();
    const double drift =
        (v_mat_ * v_inv_ - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff();
    if (drift > 1e-6) {
      v_inv_ = v_mat_.llt().solve(Eigen::MatrixXd::Identity(n, n));
      ++epoch_;
    }
  }

  Eigen::MatrixXd v_mat_;
  Eigen::MatrixXd v_inv_;
  Eigen::VectorXd xty_;
  Eigen::VectorXd alpha_hat_;
  double log_det_ratio_ = 0.0;
  long long updates_ = 0;
  long long epoch_ = 0;
};

// c = 2R sqrt(d log(1 + T/lambda) + 2 log(1/delta)) + C.
inline double confidence_coefficient(double r_noise, int d, long long t_horizon,
                                     double lambda_reg, double delta,
                                     double c_bound) {
  if (!(delta > 0.0 && delta < 1.0))
    throw std::invalid_argument("confidence_coefficient: delta must be in (0,1)");
  if (d < 1 || t_horizon < 1 || !(lambda_reg > 0.0) || r_noise < 0.0)
    throw std::invalid_argument("confidence_coefficient: invalid argument");
  const double t = static_cast<double>(t_horizon);
  return 2.0 * r_noise *
             std::sqrt(d * std::log1p(t / lambda_reg) +
                       2.0 * std::log(1.0 / delta)) +
         c_bound;
}

// beta = 2R sqrt(14 log(2K(1+log_2 T)/delta)) + C.
inline double beta_coefficient(double r_noise, int k_arms, long long t_horizon,
                               double delta, double c_bound) {
  if (!(delta > 0.0 && delta < 1.0))
    throw std::invalid_argument("beta_coefficient: delta must be in (0,1)");
  if (k_arms < 1) throw std::invalid_argument("beta_coefficient: k_arms must be >= 1");
  if (t_horizon < 2) throw std::invalid_argument("beta_coefficient: horizon must be >= 2");
  if (r_noise < 0.0) throw std::invalid_argument("beta_coefficient: negative noise");
  const double t = static_cast<double>(t_horizon);
  return 2.0 * r_noise *
             std::sqrt(14.0 *
                       std::log(2.0 * k_arms * (1.0 + std::log2(t)) / delta)) +
         c_bound;
}

// How the bound C on ||alpha*||_Lambda enters the confidence coefficient:
// a fixed constant, or the time-dependent C_t = log t that needs no a-priori
// bound (the guarantee then only kicks in once C_t >= ||alpha*||_Lambda).
enum class CBoundMode { kFixed, kLogT };

// Which dimension feeds the confidence coefficient: the effective dimension
// of the policy's spectrum, or the ambient dimension (the classical LinUCB
// choice, for comparison).
enum class ConfidenceDim { kEffective, kAmbient };

struct UcbConfig {
  double r_noise = 0.0;
  double delta = 0.0;
  double c_bound = 0.0;        // C; ignored when c_bound_mode == kLogT
  double lambda_reg = 0.0;
  long long horizon = 0;
  double c_coeff = 0.0;        // confidence_coefficient(...) for the fixed mode
  bool lazy = true;
  CBoundMode c_bound_mode = CBoundMode::kFixed;
  ConfidenceDim conf_dim = ConfidenceDim::kEffective;
  int d = 1;                   // dimension used by the coefficient
};

inline UcbConfig make_ucb_config(const RegularizedSpectrum& spectrum,
                                 double r_noise, double delta, double c_bound,
                                 long long horizon, bool lazy = true,
                                 CBoundMode c_bound_mode = CBoundMode::kFixed,
                                 ConfidenceDim conf_dim = ConfidenceDim::kEffective) {
  UcbConfig cfg;
  cfg.r_noise = r_noise;
  cfg.delta = delta;
  cfg.c_bound = c_bound;
  cfg.lambda_reg = spectrum.lambda_reg;
  cfg.horizon = horizon;
  cfg.lazy = lazy;
  cfg.c_bound_mode = c_bound_mode;
  cfg.conf_dim = conf_dim;
  cfg.d = conf_dim == ConfidenceDim::kAmbient
              ? spectrum.dim()
              : effective_dimension(spectrum, horizon).d;
  cfg.c_coeff = confidence_coefficient(r_noise, cfg.d, horizon,
                                       spectrum.lambda_reg, delta,
                                       c_bound_mode == CBoundMode::kFixed
                                           ? c_bound
                                           : 0.0);
  return cfg;
}

// One UCB policy instance (SpectralUCB, or LinUCB under a flat spectrum).
// select() evaluates argmax_v <x_v, alpha_hat> + c ||x_v||_{V^{-1}} either by
// a full eager scan or lazily. Lazy evaluation exploits that widths are
// non-increasing under updates: cached widths are upper bounds, so the
// candidate with the best stale score only needs its own width refreshed
// until the best candidate is exact. Ties break to the lowest node index in
// both modes, and both modes select identical nodes.
class UcbPolicy {
 public:
  UcbPolicy(const SpectralBasis& basis, const RegularizedSpectrum& spectrum,
            UcbConfig cfg)
      : basis_(&basis),
        cfg_(cfg),
        state_(spectrum),
        cached_width_(basis.num_nodes(), 0.0),
        width_stamp_(basis.num_nodes(), -1),
        width_epoch_(basis.num_nodes(), -1) {
    if (basis.dim() != spectrum.dim())
      throw std::invalid_argument("ucb policy: basis/spectrum dimension mismatch");
  }

  int select() { return cfg_.lazy ? select_lazy() : select_eager(); }

  void observe(int arm, double reward) {
    state_.update(basis_->arm_feature(arm), reward);
    ++t_;
  }

  long long current_step() const { return t_; }
  long long width_evaluations() const { return width_evals_; }
  const RlsState& state() const { return state_; }
  const UcbConfig& config() const { return cfg_; }

  double current_coefficient() const {
    if (cfg_.c_bound_mode == CBoundMode::kLogT)
      return confidence_coefficient(cfg_.r_noise, cfg_.d, cfg_.horizon,
                                    cfg_.lambda_reg, cfg_.delta,
                                    std::log(static_cast<double>(t_)));
    return cfg_.c_coeff;
  }

 private:
  double width_of(int v) {
    ++width_evals_;
    return state_.width(basis_->arm_feature(v));
  }

  bool width_is_exact(int v) const {
    return width_stamp_[v] == state_.num_updates() &&
           width_epoch_[v] == state_.reinversion_epoch();
  }

  // A cached width is a valid upper bound iff it was computed in the current
  // reinversion epoch (widths only shrink within an epoch).
  bool width_is_bound(int v) const {
    return width_stamp_[v] >= 0 &&
           width_epoch_[v] == state_.reinversion_epoch();
  }

  int select_eager() {
    const Eigen::VectorXd means = basis_->basis() * state_.alpha_hat();
    const double c = current_coefficient();
    int best = 0;
    double best_score = -std::numeric_limits<double>::infinity();
    for (int v = 0; v < basis_->num_nodes(); ++v) {
      const double score = means[v] + c * width_of(v);
      if (score > best_score) {
        best_score = score;
        best = v;
      }
    }
    return best;
  }

  int select_lazy() {
    const Eigen::VectorXd means = basis_->basis() * state_.alpha_hat();
    const double c = current_coefficient();
    const int n = basis_->num_nodes();
    for (;;) {
      int best = -1;
      double best_score = -std::numeric_limits<double>::infinity();
      for (int v = 0; v < n; ++v) {
        if (!width_is_bound(v)) {  // unknown width: forces a refresh
          best = v;
          best_score = std::numeric_limits<double>::infinity();
          break;
        }
        const double score = means[v] + c * cached_width_[v];
        if (score > best_score) {
          best_score = score;
          best = v;
        }
      }
      if (width_is_exact(best)) return best;
      cached_width_[best] = width_of(best);
      width_stamp_[best] = state_.num_updates();
      width_epoch_[best] = state_.reinversion_epoch();
    }
  }

  const SpectralBasis* basis_;
  UcbConfig cfg_;
  RlsState state_;
  std::vector<double> cached_width_;
  std::vector<long long> width_stamp_;
  std::vector<long long> width_epoch_;
  long long width_evals_ = 0;
  long long t_ = 1;
};

// Stateless eager argmax of <x_v, alpha_hat> + c ||x_v||_{V^{-1}}; ties break
// to the lowest node index. The lazy path in UcbPolicy must select the same
// node.
inline int spectral_ucb_select(const RlsState& state, const UcbConfig& cfg,
                               const SpectralBasis& basis) {
  if (state.dim() != basis.dim())
    throw std::invalid_argument("spectral_ucb_select: dimension mismatch");
  const Eigen::VectorXd means = basis.basis() * state.alpha_hat();
  int best = 0;
  double best_score = -std::numeric_limits<double>::infinity();
  for (int v = 0; v < basis.num_nodes(); ++v) {
    const double score =
        means[v] + cfg.c_coeff * state.width(basis.arm_feature(v));
    if (score > best_score) {
      best_score = score;
      best = v;
    }
  }
  return best;
}

// T rounds of select -> observe -> update -> record. Deterministic given the
// rng state and seeds.
inline RegretTrace run_spectral_ucb(const SpectralBasis& basis,
                                    const RegularizedSpectrum& spectrum,
                                    const RewardModel& model,
                                    const NoiseModel& noise,
                                    const UcbConfig& cfg, Rng& rng,
                                    std::uint64_t trace_seed = 0) {
  if (cfg.horizon < 1)
    throw std::invalid_argument("run_spectral_ucb: horizon must be >= 1");
  if (model.num_nodes() != basis.num_nodes())
    throw std::invalid_argument("run_spectral_ucb: model/basis node mismatch");
  UcbPolicy policy(basis, spectrum, cfg);
  RegretTrace trace(cfg.horizon, trace_seed);
  for (long long t = 1; t <= cfg.horizon; ++t) {
    const int arm = policy.select();
    const double reward = sample_reward(model, noise, arm, rng);
    policy.observe(arm, reward);
    trace.record(model, arm, reward);
  }
  return trace;
}

// LinUCB: the same machinery run under the flat spectrum lambda * I on the
// same arm features.
inline RegretTrace run_lin_ucb(const SpectralBasis& basis,
                               const RewardModel& model,
                               const NoiseModel& noise, double lambda_reg,
                               double r_noise, double delta, double c_bound,
                               long long horizon, Rng& rng,
                               std::uint64_t trace_seed = 0, bool lazy = true,
                               ConfidenceDim conf_dim = ConfidenceDim::kEffective) {
  const RegularizedSpectrum flat =
      RegularizedSpectrum::flat(basis.dim(), lambda_reg);
  const UcbConfig cfg = make_ucb_config(flat, r_noise, delta, c_bound, horizon,
                                        lazy, CBoundMode::kFixed, conf_dim);
  return run_spectral_ucb(basis, flat, model, noise, cfg, rng, trace_seed);
}

// --- SpectralEliminator ------------------------------------------------------

// Phased elimination state. Phase j spans steps [2^{j-1}, min(2^j - 1, T)];
// the active arm set shrinks monotonically and is never empty.
struct EliminatorState {
  std::vector<int> active;              // A_j, ascending node indices
  int phase = 1;                        // j
  std::vector<long long> phase_starts;  // t_j = 2^{j-1} for executed phases
  double beta = 0.0;
};

inline EliminatorState make_eliminator_state(int k_arms, double beta) {
  if (k_arms < 1)
    throw std::invalid_argument("eliminator: need at least one arm");
  EliminatorState state;
  state.active.resize(k_arms);
  for (int v = 0; v < k_arms; ++v) state.active[v] = v;
  state.beta = beta;
  return state;
}

// Plays one phase: repeatedly pulls the active arm with the largest width
// under the phase-local design matrix (fresh V = Lambda at phase start), then
// eliminates arms whose upper bound falls below the best lower bound, using
// the end-of-phase matrix and phase-local rewards only. The squared widths of
// the active arms are maintained incrementally through the rank-one identity
// w^2 -= (x^T V^{-1} x_t)^2 / (1 + x_t^T V^{-1} x_t).
inline void eliminator_phase(EliminatorState& state, const RewardModel& model,
                             const NoiseModel& noise, const SpectralBasis& basis,
                             const RegularizedSpectrum& spectrum,
                             long long horizon, Rng& rng, RegretTrace& trace) {
  if (state.active.empty())
    throw std::invalid_argument("eliminator_phase: empty active set");
  const long long t_start = 1LL << (state.phase - 1);
  const long long t_end = std::min((1LL << state.phase) - 1, horizon);
  state.phase_starts.push_back(t_start);
  RlsState rls(spectrum);
  const int n_active = static_cast<int>(state.active.size());
  Eigen::MatrixXd features(n_active, basis.dim());
  for (int i = 0; i < n_active; ++i)
    features.row(i) = basis.basis().row(state.active[i]);
  Eigen::VectorXd w2 =
      (features.array().square().rowwise() /
       spectrum.diag.transpose().array())
          .rowwise()
          .sum();
  for (long long t = t_start; t <= t_end; ++t) {
    int idx = 0;
    for (int i = 1; i < n_active; ++i)
      if (w2[i] > w2[idx]) idx = i;
    const int pulled = state.active[idx];
    const Eigen::VectorXd x = features.row(idx).transpose();
    const Eigen::VectorXd u = rls.v_inv() * x;
    const double denom = 1.0 + x.dot(u);
    w2 -= (features * u).cwiseAbs2() / denom;
    w2 = w2.cwiseMax(0.0);
    const double reward = sample_reward(model, noise, pulled, rng);
    rls.update(x, reward);
    trace.record(model, pulled, reward);
  }
  std::vector<double> mean(state.active.size());
  std::vector<double> width(state.active.size());
  double threshold = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < state.active.size(); ++i) {
    const Eigen::VectorXd x = basis.arm_feature(state.active[i]);
    mean[i] = rls.alpha_hat().dot(x);
    width[i] = rls.width(x);
    threshold = std::max(threshold, mean[i] - state.beta * width[i]);
  }
  std::vector<int> retained;
  for (std::size_t i = 0; i < state.active.size(); ++i)
    if (mean[i] + state.beta * width[i] >= threshold)
      retained.push_back(state.active[i]);
  state.active = std::move(retained);  // nonempty: the maximizer survives
  ++state.phase;
}

// Runs phases j = 1..J with J = floor(log2 T) + 1, clipping the final phase
// at T.
inline RegretTrace run_spectral_eliminator(const SpectralBasis& basis,
                                           const RegularizedSpectrum& spectrum,
                                           const RewardModel& model,
                                           const NoiseModel& noise, double beta,
                                           long long horizon, Rng& rng,
                                           std::uint64_t trace_seed = 0) {
  if (horizon < 1)
    throw std::invalid_argument("run_spectral_eliminator: horizon must be >= 1");
  if (model.num_nodes() != basis.num_nodes())
    throw std::invalid_argument("run_spectral_eliminator: model/basis node mismatch");
  EliminatorState state = make_eliminator_state(basis.num_nodes(), beta);
  RegretTrace trace(horizon, trace_seed);
  const int total_phases =
      static_cast<int>(std::floor(std::log2(static_cast<double>(horizon)))) + 1;
  for (int j = 1; j <= total_phases; ++j)
    eliminator_phase(state, model, noise, basis, spectrum, horizon, rng, trace);
  return trace;
}

// LinearEliminator: the eliminator under the flat spectrum lambda * I.
inline RegretTrace run_linear_eliminator(const SpectralBasis& basis,
                                         const RewardModel& model,
                                         const NoiseModel& noise,
                                         double lambda_reg, double beta,
                                         long long horizon, Rng& rng,
                                         std::uint64_t trace_seed = 0) {
  const RegularizedSpectrum flat =
      RegularizedSpectrum::flat(basis.dim(), lambda_reg);
  return run_spectral_eliminator(basis, flat, model, noise, beta, horizon, rng,
                                 trace_seed);
}

}  // namespace specband
