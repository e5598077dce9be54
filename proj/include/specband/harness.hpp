#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <istream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "specband/env.hpp"
#include "specband/graph.hpp"
#include "specband/policies.hpp"
#include "specband/rng.hpp"
#include "specband/spectral.hpp"

namespace specband {

// Configuration problems (bad flags, malformed config files) are reported as
// ConfigError so the CLI can exit 2 instead of 3.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class GraphKind { kErdosRenyi, kBarabasiAlbert, kLattice, kEdgeList, kKnn };

struct GraphSpec {
  GraphKind kind = GraphKind::kErdosRenyi;
  int n = 0;
  double p = 0.0;
  int m = 0;
  int side = 0;
  int dims = 0;
  int k = 0;
  std::string path;
  std::uint64_t seed = 0;

  friend bool operator==(const GraphSpec&, const GraphSpec&) = default;
};

enum class RewardKind { kSparseSmooth, kLatent };

struct RewardSpec {
  RewardKind kind = RewardKind::kSparseSmooth;
  int k = 5;
  std::uint64_t seed = 0;
  bool rescale01 = false;
  std::string path;          // latent-vector file
  std::vector<double> user;  // user vector for latent rewards

  friend bool operator==(const RewardSpec&, const RewardSpec&) = default;
};

enum class PolicyKind {
  kSpectralUcb,
  kLinUcb,
  kSpectralEliminator,
  kLinearEliminator
};

enum class CMode { kExact, kLogT, kFixedValue };

struct PolicySpec {
  PolicyKind kind = PolicyKind::kSpectralUcb;
  std::string name;  // output label; defaults to the kind string
  double lambda_reg = 0.01;
  double delta = 0.001;
  CMode c_mode = CMode::kExact;
  double c_value = 0.0;  // used when c_mode == kFixedValue
  int truncate = 0;      // keep first L eigenvectors; 0 = full basis
  bool lazy = true;
  ConfidenceDim conf_dim = ConfidenceDim::kEffective;

  friend bool operator==(const PolicySpec&, const PolicySpec&) = default;
};

struct ExperimentConfig {
  GraphSpec graph;
  RewardSpec reward;
  double noise_r = 0.01;
  long long horizon = 250;
  int replicates = 1;
  std::uint64_t base_seed = 0;
  std::vector<PolicySpec> policies;

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

// --- string maps -------------------------------------------------------------

inline std::string to_string(GraphKind k) {
  switch (k) {
    case GraphKind::kErdosRenyi: return "er";
    case GraphKind::kBarabasiAlbert: return "ba";
    case GraphKind::kLattice: return "lattice";
    case GraphKind::kEdgeList: return "edgelist";
    case GraphKind::kKnn: return "knn";
  }
  return "?";
}

inline std::string to_string(PolicyKind k) {
  switch (k) {
    case PolicyKind::kSpectralUcb: return "spectral_ucb";
    case PolicyKind::kLinUcb: return "lin_ucb";
    case PolicyKind::kSpectralEliminator: return "spectral_eliminator";
    case PolicyKind::kLinearEliminator: return "linear_eliminator";
  }
  return "?";
}

namespace detail {

inline GraphKind graph_kind_from(const std::string& s) {
  if (s == "er") return GraphKind::kErdosRenyi;
  if (s == "ba") return GraphKind::kBarabasiAlbert;
  if (s == "lattice") return GraphKind::kLattice;
  if (s == "edgelist") return GraphKind::kEdgeList;
  if (s == "knn") return GraphKind::kKnn;
  throw ConfigError("unknown graph kind '" + s + "'");
}

inline PolicyKind policy_kind_from(const std::string& s) {
  if (s == "spectral_ucb") return PolicyKind::kSpectralUcb;
  if (s == "lin_ucb") return PolicyKind::kLinUcb;
  if (s == "spectral_eliminator") return PolicyKind::kSpectralEliminator;
  if (s == "linear_eliminator") return PolicyKind::kLinearEliminator;
  throw ConfigError("unknown policy kind '" + s + "'");
}

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline long long parse_int(const std::string& v, const std::string& key) {
  try {
    std::size_t pos = 0;
    const long long x = std::stoll(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("invalid integer for '" + key + "': " + v);
  }
}

inline std::uint64_t parse_u64(const std::string& v, const std::string& key) {
  try {
    std::size_t pos = 0;
    const unsigned long long x = std::stoull(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("invalid seed for '" + key + "': " + v);
  }
}

inline double parse_double(const std::string& v, const std::string& key) {
  try {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("invalid number for '" + key + "': " + v);
  }
}

inline bool parse_bool(const std::string& v, const std::string& key) {
  if (v == "true") return true;
  if (v == "false") return false;
  throw ConfigError("invalid boolean for '" + key + "': " + v);
}

inline void apply_graph_key(GraphSpec& g, const std::string& key,
                            const std::string& value) {
  if (key == "kind") g.kind = graph_kind_from(value);
  else if (key == "n") g.n = static_cast<int>(parse_int(value, key));
  else if (key == "p") g.p = parse_double(value, key);
  else if (key == "m") g.m = static_cast<int>(parse_int(value, key));
  else if (key == "side") g.side = static_cast<int>(parse_int(value, key));
  else if (key == "dims") g.dims = static_cast<int>(parse_int(value, key));
  else if (key == "k") g.k = static_cast<int>(parse_int(value, key));
  else if (key == "path") g.path = value;
  else if (key == "seed") g.seed = parse_u64(value, key);
  else throw ConfigError("unknown graph key '" + key + "'");
}

}  // namespace detail

// Compact graph spec: "ba:n=500,m=3,seed=1", "er:n=500,p=0.03",
// "lattice:side=5,dims=4", "edgelist:path=g.edges", "knn:path=v.txt,k=10".
inline GraphSpec parse_graph_spec(const std::string& text) {
  GraphSpec g;
  const auto colon = text.find(':');
  g.kind = detail::graph_kind_from(text.substr(0, colon));
  if (colon == std::string::npos) return g;
  std::string rest = text.substr(colon + 1);
  std::istringstream parts(rest);
  std::string item;
  while (std::getline(parts, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos)
      throw ConfigError("graph spec item '" + item + "' is not key=value");
    detail::apply_graph_key(g, detail::trim(item.substr(0, eq)),
                            detail::trim(item.substr(eq + 1)));
  }
  return g;
}

inline Graph build_graph(const GraphSpec& spec) {
  switch (spec.kind) {
    case GraphKind::kErdosRenyi:
      return gen_erdos_renyi(spec.n, spec.p, spec.seed);
    case GraphKind::kBarabasiAlbert:
      return gen_barabasi_albert(spec.n, spec.m, spec.seed);
    case GraphKind::kLattice:
      return gen_lattice(spec.side, spec.dims, spec.seed);
    case GraphKind::kEdgeList:
      return load_edge_list(spec.path);
    case GraphKind::kKnn:
      return knn_graph(load_latent_vectors(spec.path), spec.k);
  }
  throw ConfigError("graph spec has no kind");
}

// Ground-truth model for the configured reward. Latent rewards f(v) =
// <user, item_v> are projected onto the basis (alpha = Q^T f, exact for the
// full basis).
inline RewardModel build_reward(const RewardSpec& spec,
                                const SpectralBasis& basis) {
  std::optional<RewardModel> model;
  switch (spec.kind) {
    case RewardKind::kSparseSmooth:
      model.emplace(gen_sparse_smooth_reward(basis, spec.k, spec.seed));
      break;
    case RewardKind::kLatent: {
      const auto vectors = load_latent_vectors(spec.path);
      if (static_cast<int>(vectors.size()) != basis.num_nodes())
        throw std::invalid_argument(
            "latent reward: item count does not match the graph");
      Eigen::VectorXd f(vectors.size());
      const Eigen::Map<const Eigen::VectorXd> user(spec.user.data(),
                                                   static_cast<long>(spec.user.size()));
      for (std::size_t i = 0; i < vectors.size(); ++i) {
        if (vectors[i].size() != user.size())
          throw std::invalid_argument(
              "latent reward: user vector dimension mismatch");
        f[static_cast<long>(i)] = user.dot(vectors[i]);
      }
      model.emplace(basis, basis.basis().transpose() * f);
      break;
    }
  }
  if (spec.rescale01) model.emplace(rescale_to_unit_interval(*model, basis));
  return std::move(*model);
}

// --- config file --------------------------------------------------------------
// Flat key-value text with section headers; see README for the reference.

inline ExperimentConfig parse_config(std::istream& in) {
  ExperimentConfig cfg;
  std::string section;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = detail::trim(line);
    if (t.empty() || t[0] == '#') continue;
    if (t.front() == '[') {
      if (t.back() != ']')
        throw ConfigError("line " + std::to_string(line_no) +
                          ": unterminated section header");
      section = t.substr(1, t.size() - 2);
      if (section == "policy")
        cfg.policies.emplace_back();
      else if (section != "graph" && section != "reward" &&
               section != "noise" && section != "run")
        throw ConfigError("line " + std::to_string(line_no) +
                          ": unknown section [" + section + "]");
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(line_no) +
                        ": expected key = value");
    const std::string key = detail::trim(t.substr(0, eq));
    const std::string value = detail::trim(t.substr(eq + 1));
    try {
      if (section == "graph") {
        detail::apply_graph_key(cfg.graph, key, value);
      } else if (section == "reward") {
        if (key == "kind") {
          if (value == "sparse") cfg.reward.kind = RewardKind::kSparseSmooth;
          else if (value == "latent") cfg.reward.kind = RewardKind::kLatent;
          else throw ConfigError("unknown reward kind '" + value + "'");
        } else if (key == "k") cfg.reward.k = static_cast<int>(detail::parse_int(value, key));
        else if (key == "seed") cfg.reward.seed = detail::parse_u64(value, key);
        else if (key == "rescale01") cfg.reward.rescale01 = detail::parse_bool(value, key);
        else if (key == "path") cfg.reward.path = value;
        else if (key == "user") {
          cfg.reward.user.clear();
          std::istringstream nums(value);
          double x;
          while (nums >> x) cfg.reward.user.push_back(x);
          if (!nums.eof()) throw ConfigError("invalid user vector");
        } else throw ConfigError("unknown reward key '" + key + "'");
      } else if (section == "noise") {
        if (key == "r") cfg.noise_r = detail::parse_double(value, key);
        else throw ConfigError("unknown noise key '" + key + "'");
      } else if (section == "run") {
        if (key == "horizon") cfg.horizon = detail::parse_int(value, key);
        else if (key == "replicates") cfg.replicates = static_cast<int>(detail::parse_int(value, key));
        else if (key == "base_seed") cfg.base_seed = detail::parse_u64(value, key);
        else throw ConfigError("unknown run key '" + key + "'");
      } else if (section == "policy") {
        PolicySpec& p = cfg.policies.back();
        if (key == "kind") p.kind = detail::policy_kind_from(value);
        else if (key == "name") p.name = value;
        else if (key == "lambda") p.lambda_reg = detail::parse_double(value, key);
        else if (key == "delta") p.delta = detail::parse_double(value, key);
        else if (key == "c_mode") {
          if (value == "exact") p.c_mode = CMode::kExact;
          else if (value == "log_t") p.c_mode = CMode::kLogT;
          else if (value == "fixed") p.c_mode = CMode::kFixedValue;
          else throw ConfigError("unknown c_mode '" + value + "'");
        } else if (key == "c_value") p.c_value = detail::parse_double(value, key);
        else if (key == "truncate") p.truncate = static_cast<int>(detail::parse_int(value, key));
        else if (key == "lazy") p.lazy = detail::parse_bool(value, key);
        else if (key == "conf_dim") {
          if (value == "effective") p.conf_dim = ConfidenceDim::kEffective;
          else if (value == "ambient") p.conf_dim = ConfidenceDim::kAmbient;
          else throw ConfigError("unknown conf_dim '" + value + "'");
        } else throw ConfigError("unknown policy key '" + key + "'");
      } else {
        throw ConfigError("key outside any section");
      }
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (cfg.horizon < 1) throw ConfigError("run.horizon must be >= 1");
  if (cfg.replicates < 1) throw ConfigError("run.replicates must be >= 1");
  if (cfg.policies.empty()) throw ConfigError("config declares no [policy]");
  for (PolicySpec& p : cfg.policies)
    if (p.name.empty()) p.name = to_string(p.kind);
  return cfg;
}

inline ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  return parse_config(in);
}

inline std::string serialize_config(const ExperimentConfig& cfg) {
  std::ostringstream out;
  out << std::setprecision(17);
  out << "[graph]\n";
  out << "kind = " << to_string(cfg.graph.kind) << "\n";
  switch (cfg.graph.kind) {
    case GraphKind::kErdosRenyi:
      out << "n = " << cfg.graph.n << "\np = " << cfg.graph.p << "\n";
      break;
    case GraphKind::kBarabasiAlbert:
      out << "n = " << cfg.graph.n << "\nm = " << cfg.graph.m << "\n";
      break;
    case GraphKind::kLattice:
      out << "side = " << cfg.graph.side << "\ndims = " << cfg.graph.dims << "\n";
      break;
    case GraphKind::kEdgeList:
      out << "path = " << cfg.graph.path << "\n";
      break;
    case GraphKind::kKnn:
      out << "path = " << cfg.graph.path << "\nk = " << cfg.graph.k << "\n";
      break;
  }
  if (cfg.graph.kind != GraphKind::kEdgeList && cfg.graph.kind != GraphKind::kKnn)
    out << "seed = " << cfg.graph.seed << "\n";
  out << "\n[reward]\n";
  if (cfg.reward.kind == RewardKind::kSparseSmooth) {
    out << "kind = sparse\n";
    out << "k = " << cfg.reward.k << "\n";
    out << "seed = " << cfg.reward.seed << "\n";
  } else {
    out << "kind = latent\n";
    out << "path = " << cfg.reward.path << "\n";
    out << "user =";
    for (const double x : cfg.reward.user) out << " " << x;
    out << "\n";
  }
  out << "rescale01 = " << (cfg.reward.rescale01 ? "true" : "false") << "\n";
  out << "\n[noise]\nr = " << cfg.noise_r << "\n";
  out << "\n[run]\n";
  out << "horizon = " << cfg.horizon << "\n";
  out << "replicates = " << cfg.replicates << "\n";
  out << "base_seed = " << cfg.base_seed << "\n";
  for (const PolicySpec& p : cfg.policies) {
    out << "\n[policy]\n";
    out << "kind = " << to_string(p.kind) << "\n";
    out << "name = " << p.name << "\n";
    out << "lambda = " << p.lambda_reg << "\n";
    out << "delta = " << p.delta << "\n";
    out << "c_mode = "
        << (p.c_mode == CMode::kExact
                ? "exact"
                : p.c_mode == CMode::kLogT ? "log_t" : "fixed")
        << "\n";
    if (p.c_mode == CMode::kFixedValue) out << "c_value = " << p.c_value << "\n";
    out << "truncate = " << p.truncate << "\n";
    out << "lazy = " << (p.lazy ? "true" : "false") << "\n";
    out << "conf_dim = "
        << (p.conf_dim == ConfidenceDim::kEffective ? "effective" : "ambient")
        << "\n";
  }
  return out.str();
}

// --- experiment execution ------------------------------------------------------

struct PolicySummary {
  std::string policy;
  int replicates = 0;
  double mean_final_regret = 0.0;
  double std_final_regret = 0.0;
  double mean_runtime_ms = 0.0;
};

struct ExperimentResult {
  std::vector<PolicySummary> summary;
  std::vector<std::vector<RegretTrace>> traces;  // [policy][replicate]
  std::vector<std::string> policy_names;
};

inline void write_summary_csv(const std::vector<PolicySummary>& rows,
                              std::ostream& out) {
  out << "policy,replicates,mean_final_regret,std_final_regret,mean_runtime_ms\n";
  out << std::setprecision(12);
  for (const PolicySummary& r : rows)
    out << r.policy << "," << r.replicates << "," << r.mean_final_regret << ","
        << r.std_final_regret << "," << r.mean_runtime_ms << "\n";
}

namespace detail {

struct PreparedPolicy {
  std::string name;
  PolicySpec spec;
  SpectralBasis basis;
  RegularizedSpectrum spectrum;
  UcbConfig ucb_cfg;  // UCB kinds
  double beta = 0.0;  // eliminator kinds
};

inline double resolve_c_bound(const PolicySpec& spec, const RewardModel& model,
                              const RegularizedSpectrum& spectrum) {
  switch (spec.c_mode) {
    case CMode::kExact: {
      // the harness knows the true alpha*; its first dim() coordinates are
      // the representable part under a truncated basis
      const Eigen::VectorXd head = model.alpha_star().head(spectrum.dim());
      return lambda_norm(head, spectrum);
    }
    case CMode::kFixedValue:
      return spec.c_value;
    case CMode::kLogT:
      return 0.0;  // C_t supplied per-step by the policy
  }
  return 0.0;
}

}  // namespace detail

// Builds graph -> basis -> spectrum -> reward once, then runs each policy x
// replicate with seeds derive_seed(base_seed, replicate). Writes
// trace_<policy>_<replicate>.csv and summary.csv under out_dir (if not
// empty). Replicates run concurrently up to `jobs`; each replicate owns its
// rng and trace.
inline ExperimentResult run_experiment(const ExperimentConfig& cfg,
                                       const std::string& out_dir,
                                       int jobs = 1,
                                       const std::string& basis_cache = "") {
  const auto stage = [](const std::string& name, auto&& fn) {
    try {
      return fn();
    } catch (const std::exception& e) {
      throw std::runtime_error("experiment stage '" + name + "' failed: " +
                               e.what());
    }
  };

  const Graph graph = stage("graph", [&] { return build_graph(cfg.graph); });
  const SpectralBasis basis = stage("basis", [&] {
    if (!basis_cache.empty()) {
      const std::uint64_t key = edge_list_content_hash(graph);
      if (auto cached = load_basis_cache(basis_cache, key)) return *std::move(cached);
      SpectralBasis fresh = eigendecompose(laplacian(graph));
      save_basis_cache(basis_cache, key, fresh);
      return fresh;
    }
    return eigendecompose(laplacian(graph));
  });
  const RewardModel model =
      stage("reward", [&] { return build_reward(cfg.reward, basis); });
  const NoiseModel noise(cfg.noise_r);

  std::vector<detail::PreparedPolicy> prepared;
  stage("policies", [&] {
    for (const PolicySpec& p : cfg.policies) {
      SpectralBasis pb = (p.truncate > 0 && p.truncate < basis.dim())
                             ? truncate_basis(basis, p.truncate)
                             : basis;
      const bool flat = p.kind == PolicyKind::kLinUcb ||
                        p.kind == PolicyKind::kLinearEliminator;
      RegularizedSpectrum spectrum =
          flat ? RegularizedSpectrum::flat(pb.dim(), p.lambda_reg)
               : regularize(pb, p.lambda_reg);
      const double c_bound = detail::resolve_c_bound(p, model, spectrum);
      detail::PreparedPolicy prep{p.name, p, std::move(pb), std::move(spectrum),
                                  UcbConfig{}, 0.0};
      if (p.kind == PolicyKind::kSpectralUcb || p.kind == PolicyKind::kLinUcb) {
        prep.ucb_cfg = make_ucb_config(
            prep.spectrum, cfg.noise_r, p.delta, c_bound, cfg.horizon, p.lazy,
            p.c_mode == CMode::kLogT ? CBoundMode::kLogT : CBoundMode::kFixed,
            p.conf_dim);
      } else {
        if (p.c_mode == CMode::kLogT)
          throw ConfigError("c_mode = log_t applies to the UCB policies only");
        prep.beta = beta_coefficient(cfg.noise_r, basis.num_nodes(),
                                     cfg.horizon, p.delta, c_bound);
      }
      prepared.push_back(std::move(prep));
    }
    return 0;
  });

  const int n_policies = static_cast<int>(prepared.size());
  std::vector<std::vector<std::optional<RegretTrace>>> slots(n_policies);
  std::vector<std::vector<double>> runtime_ms(n_policies);
  for (int p = 0; p < n_policies; ++p) {
    slots[p].resize(cfg.replicates);
    runtime_ms[p].assign(cfg.replicates, 0.0);
  }

  const int total_tasks = n_policies * cfg.replicates;
  std::atomic<int> next_task{0};
  const auto worker = [&] {
    for (;;) {
      const int task = next_task.fetch_add(1);
      if (task >= total_tasks) return;
      const int p = task / cfg.replicates;
      const int rep = task % cfg.replicates;
      const detail::PreparedPolicy& pp = prepared[p];
      const std::uint64_t seed = derive_seed(cfg.base_seed, rep);
      Rng rng(seed);
      const auto start = std::chrono::steady_clock::now();
      RegretTrace trace =
          (pp.spec.kind == PolicyKind::kSpectralUcb ||
           pp.spec.kind == PolicyKind::kLinUcb)
              ? run_spectral_ucb(pp.basis, pp.spectrum, model, noise, pp.ucb_cfg,
                                 rng, seed)
              : run_spectral_eliminator(pp.basis, pp.spectrum, model, noise,
                                        pp.beta, cfg.horizon, rng, seed);
      const auto stop = std::chrono::steady_clock::now();
      runtime_ms[p][rep] =
          std::chrono::duration<double, std::milli>(stop - start).count();
      slots[p][rep] = std::move(trace);
    }
  };
  const int n_threads = std::max(1, std::min(jobs, total_tasks));
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(n_threads));
    for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    for (std::thread& th : pool) th.join();
  }

  ExperimentResult result;
  for (int p = 0; p < n_policies; ++p) {
    std::vector<RegretTrace> traces;
    traces.reserve(static_cast<std::size_t>(cfg.replicates));
    for (int rep = 0; rep < cfg.replicates; ++rep)
      traces.push_back(*std::move(slots[p][rep]));
    double mean = 0.0;
    for (const RegretTrace& t : traces) mean += t.final_cum_regret();
    mean /= cfg.replicates;
    double var = 0.0;
    for (const RegretTrace& t : traces) {
      const double d = t.final_cum_regret() - mean;
      var += d * d;
    }
    const double stddev =
        cfg.replicates > 1 ? std::sqrt(var / (cfg.replicates - 1)) : 0.0;
    double mean_ms = 0.0;
    for (const double ms : runtime_ms[p]) mean_ms += ms;
    mean_ms /= cfg.replicates;
    result.summary.push_back({prepared[p].name, cfg.replicates, mean, stddev,
                              mean_ms});
    result.traces.push_back(std::move(traces));
    result.policy_names.push_back(prepared[p].name);
  }

  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    for (int p = 0; p < n_policies; ++p)
      for (int rep = 0; rep < cfg.replicates; ++rep) {
        const std::string path = out_dir + "/trace_" + result.policy_names[p] +
                                 "_" + std::to_string(rep) + ".csv";
        write_trace_csv(result.traces[p][rep], path);
      }
    std::ofstream out(out_dir + "/summary.csv");
    if (!out)
      throw std::runtime_error("run_experiment: cannot write summary.csv");
    write_summary_csv(result.summary, out);
  }
  return result;
}

// Effective dimension d over a horizon grid for one graph spec.
inline std::vector<std::pair<long long, int>> effdim_report(
    const GraphSpec& graph_spec, double lambda_reg, long long t_min,
    long long t_max) {
  if (t_min < 1 || t_max < t_min)
    throw ConfigError("effdim: need 1 <= tmin <= tmax");
  const Graph graph = build_graph(graph_spec);
  const SpectralBasis basis = eigendecompose(laplacian(graph));
  const RegularizedSpectrum spectrum = regularize(basis, lambda_reg);
  std::vector<std::pair<long long, int>> rows;
  rows.reserve(static_cast<std::size_t>(t_max - t_min + 1));
  for (long long t = t_min; t <= t_max; ++t)
    rows.emplace_back(t, effective_dimension(spectrum, t).d);
  return rows;
}

inline void write_effdim_csv(const std::vector<std::pair<long long, int>>& rows,
                             std::ostream& out) {
  out << "T,d\n";
  for (const auto& [t, d] : rows) out << t << "," << d << "\n";
}

}  // namespace specband
