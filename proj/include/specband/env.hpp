#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "specband/rng.hpp"
#include "specband/spectral.hpp"

namespace specband {

enum class NoiseKind { kGaussian };

// R-sub-Gaussian observation noise, instantiated as Normal(0, R^2).
struct NoiseModel {
  NoiseKind kind = NoiseKind::kGaussian;
  double scale = 0.0;

  explicit NoiseModel(double r) : scale(r) {
    if (!(r >= 0.0) || !std::isfinite(r))
      throw std::invalid_argument("noise model: scale must be finite and >= 0");
  }
};

// Ground-truth reward function f = Q * alpha_star over nodes, with the best
// node precomputed (lowest index on ties).
class RewardModel {
 public:
  RewardModel(const SpectralBasis& basis, Eigen::VectorXd alpha_star,
              bool unit_mapped = false)
      : alpha_star_(std::move(alpha_star)),
        mean_rewards_(basis.basis() * alpha_star_),
        unit_mapped_(unit_mapped) {
    if (alpha_star_.size() != basis.dim())
      throw std::invalid_argument("reward model: alpha dimension mismatch");
    best_value_ = mean_rewards_[0];
    best_node_ = 0;
    for (int v = 1; v < mean_rewards_.size(); ++v) {
      if (mean_rewards_[v] > best_value_) {
        best_value_ = mean_rewards_[v];
        best_node_ = v;
      }
    }
  }

  int num_nodes() const { return static_cast<int>(mean_rewards_.size()); }
  const Eigen::VectorXd& alpha_star() const { return alpha_star_; }
  const Eigen::VectorXd& mean_rewards() const { return mean_rewards_; }
  double mean_reward(int v) const { return mean_rewards_[v]; }
  double best_value() const { return best_value_; }
  int best_node() const { return best_node_; }
  // whether the [0,1] affine map was applied at construction
  bool unit_mapped() const { return unit_mapped_; }

 private:
  Eigen::VectorXd alpha_star_;
  Eigen::VectorXd mean_rewards_;
  double best_value_;
  int best_node_;
  bool unit_mapped_;
};

// k-sparse smooth reward: alpha_star supported on the k smoothest
// eigenvectors (coordinates 0..k-1), entries uniform(-1,1), then globally
// rescaled so max_v |f(v)| = 1.
inline RewardModel gen_sparse_smooth_reward(const SpectralBasis& basis, int k,
                                            std::uint64_t seed) {
  if (k < 1 || k > basis.dim())
    throw std::invalid_argument("gen_sparse_smooth_reward: k out of range");
  Rng rng(seed);
  Eigen::VectorXd alpha = Eigen::VectorXd::Zero(basis.dim());
  double scale = 0.0;
  while (scale == 0.0) {
    for (int i = 0; i < k; ++i) alpha[i] = 2.0 * rng.uniform01() - 1.0;
    scale = (basis.basis() * alpha).cwiseAbs().maxCoeff();
  }
  alpha /= scale;
  return RewardModel(basis, std::move(alpha));
}

// f -> (f+1)/2 realized on the coefficients as alpha/2 + Q^T (1/2); exact
// when the basis is complete (Q Q^T = I). Used by eliminator experiments
// that assume rewards in [0,1].
inline RewardModel rescale_to_unit_interval(const RewardModel& model,
                                            const SpectralBasis& basis) {
  Eigen::VectorXd alpha =
      0.5 * model.alpha_star() +
      basis.basis().transpose() *
          Eigen::VectorXd::Constant(basis.num_nodes(), 0.5);
  return RewardModel(basis, std::move(alpha), /*unit_mapped=*/true);
}

// Noisy observation r = f(v) + eps, eps ~ Normal(0, R^2).
inline double sample_reward(const RewardModel& model, const NoiseModel& noise,
                            int v, Rng& rng) {
  if (v < 0 || v >= model.num_nodes())
    throw std::invalid_argument("sample_reward: node out of range");
  return model.mean_reward(v) + noise.scale * rng.normal();
}

struct StepRecord {
  long long t = 0;
  int arm = 0;
  double reward = 0.0;       // observed (noisy) reward, diagnostics only
  double inst_regret = 0.0;  // best_value - f(arm), from mean rewards
  double cum_regret = 0.0;

  friend bool operator==(const StepRecord&, const StepRecord&) = default;
};

// Per-run regret accounting. Pseudo-regret: instantaneous regret uses mean
// rewards, so a fixed action sequence yields the same trace under any noise.
class RegretTrace {
 public:
  RegretTrace(long long horizon, std::uint64_t seed)
      : horizon_(horizon), seed_(seed) {
    if (horizon < 1)
      throw std::invalid_argument("regret trace: horizon must be >= 1");
    steps_.reserve(static_cast<std::size_t>(horizon));
  }

  void record(const RewardModel& model, int arm, double observed_reward) {
    const double inst = model.best_value() - model.mean_reward(arm);
    const double cum = (steps_.empty() ? 0.0 : steps_.back().cum_regret) + inst;
    steps_.push_back({static_cast<long long>(steps_.size()) + 1, arm,
                      observed_reward, inst, cum});
  }

  long long horizon() const { return horizon_; }
  std::uint64_t seed() const { return seed_; }
  const std::vector<StepRecord>& steps() const { return steps_; }
  double final_cum_regret() const {
    return steps_.empty() ? 0.0 : steps_.back().cum_regret;
  }

  friend bool operator==(const RegretTrace&, const RegretTrace&) = default;

 private:
  long long horizon_;
  std::uint64_t seed_;
  std::vector<StepRecord> steps_;
};

inline void write_trace_csv(const RegretTrace& trace, std::ostream& out) {
  out << "seed,t,arm,reward,inst_regret,cum_regret\n";
  out << std::setprecision(12);
  for (const StepRecord& s : trace.steps())
    out << trace.seed() << "," << s.t << "," << s.arm << "," << s.reward << ","
        << s.inst_regret << "," << s.cum_regret << "\n";
}

inline void write_trace_csv(const RegretTrace& trace, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_trace_csv: cannot open " + path);
  write_trace_csv(trace, out);
}

// Reads back a trace CSV; used by summary recompute checks.
inline std::vector<StepRecord> read_trace_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) ||
      line != "seed,t,arm,reward,inst_regret,cum_regret")
    throw std::runtime_error("read_trace_csv: missing or unexpected header");
  std::vector<StepRecord> steps;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    StepRecord s;
    unsigned long long seed;
    char c1, c2, c3, c4, c5;
    std::istringstream fields(line);
    fields >> seed >> c1 >> s.t >> c2 >> s.arm >> c3 >> s.reward >> c4 >>
        s.inst_regret >> c5 >> s.cum_regret;
    if (fields.fail() || c1 != ',' || c2 != ',' || c3 != ',' || c4 != ',' ||
        c5 != ',')
      throw std::runtime_error("read_trace_csv: malformed row at line " +
                               std::to_string(line_no));
    steps.push_back(s);
  }
  return steps;
}

inline std::vector<StepRecord> read_trace_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_trace_csv: cannot open " + path);
  return read_trace_csv(in);
}

// Latent-vector file: one vector per line, space-separated floats, `#`
// comments. All rows must have the same dimension.
inline std::vector<Eigen::VectorXd> load_latent_vectors(std::istream& in) {
  std::vector<Eigen::VectorXd> vectors;
  std::string line;
  int line_no = 0;
  long long dim = -1;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream fields(line);
    std::vector<double> row;
    double value;
    while (fields >> value) row.push_back(value);
    if (!fields.eof())
      throw std::runtime_error("load_latent_vectors: row " +
                               std::to_string(line_no) + ": malformed value");
    if (dim < 0) dim = static_cast<long long>(row.size());
    if (static_cast<long long>(row.size()) != dim)
      throw std::runtime_error("load_latent_vectors: row " +
                               std::to_string(line_no) + " has " +
                               std::to_string(row.size()) +
                               " values, expected " + std::to_string(dim));
    vectors.push_back(Eigen::Map<Eigen::VectorXd>(row.data(),
                                                  static_cast<long>(row.size())));
  }
  return vectors;
}

inline std::vector<Eigen::VectorXd> load_latent_vectors(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_latent_vectors: cannot open " + path);
  return load_latent_vectors(in);
}

}  // namespace specband
