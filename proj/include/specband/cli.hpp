#pragma once

#include <CLI11.hpp>

#include <cstdlib>
#include <exception>
#include <fstream>
#include <iostream>
#include <string>

#include "specband/harness.hpp"

namespace specband {

namespace detail {

inline int default_jobs() {
  if (const char* env = std::getenv("SPECTRAL_BANDITS_JOBS")) {
    const int jobs = std::atoi(env);
    if (jobs >= 1) return jobs;
  }
  return 1;
}

}  // namespace detail

// Exit codes: 0 success, 2 usage/config error, 3 runtime error.
inline int cli_main(int argc, const char* const* argv) {
  CLI::App app{"Bandit optimization of smooth graph functions"};
  app.require_subcommand(1);

  std::string graph_spec_text;
  std::string out_path;
  std::string config_path;
  double lambda_reg = 0.01;
  long long t_min = 1;
  long long t_max = 250;
  int jobs = detail::default_jobs();
  std::string basis_cache;

  CLI::App* gen = app.add_subcommand("gen-graph", "Generate a graph and write its edge list");
  gen->add_option("--graph", graph_spec_text, "Graph spec, e.g. ba:n=500,m=3,seed=1")->required();
  gen->add_option("--out", out_path, "Output edge-list path")->required();

  CLI::App* eff = app.add_subcommand("effdim", "Tabulate effective dimension over a horizon grid");
  eff->add_option("--graph", graph_spec_text, "Graph spec")->required();
  eff->add_option("--lambda", lambda_reg, "Regularization lambda");
  eff->add_option("--tmin", t_min, "Smallest horizon");
  eff->add_option("--tmax", t_max, "Largest horizon")->required();
  eff->add_option("--out", out_path, "Output CSV path ('-' for stdout)");

  CLI::App* run = app.add_subcommand("run", "Run an experiment from a config file");
  run->add_option("--config", config_path, "Experiment config file")->required();
  run->add_option("--out", out_path, "Output directory")->required();
  run->add_option("--jobs", jobs, "Concurrent replicates (env SPECTRAL_BANDITS_JOBS)");
  run->add_option("--basis-cache", basis_cache, "Basis cache file to reuse/create");

  CLI::App* compare = app.add_subcommand("compare", "Run an experiment and rank policies");
  compare->add_option("--config", config_path, "Experiment config file")->required();
  compare->add_option("--out", out_path, "Output directory")->required();
  compare->add_option("--jobs", jobs, "Concurrent replicates");
  compare->add_option("--basis-cache", basis_cache, "Basis cache file to reuse/create");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (gen->parsed()) {
      const Graph g = build_graph(parse_graph_spec(graph_spec_text));
      save_edge_list(g, out_path);
      std::cout << "wrote " << out_path << " (" << g.num_nodes() << " nodes, "
                << g.edges().size() << " edges)\n";
    } else if (eff->parsed()) {
      const auto rows =
          effdim_report(parse_graph_spec(graph_spec_text), lambda_reg, t_min, t_max);
      if (out_path.empty() || out_path == "-") {
        write_effdim_csv(rows, std::cout);
      } else {
        std::ofstream out(out_path);
        if (!out) throw std::runtime_error("cannot open " + out_path);
        write_effdim_csv(rows, out);
        std::cout << "wrote " << out_path << "\n";
      }
    } else if (run->parsed() || compare->parsed()) {
      const ExperimentConfig cfg = parse_config_file(config_path);
      const ExperimentResult result = run_experiment(cfg, out_path, jobs, basis_cache);
      std::cout << "wrote " << result.summary.size() * cfg.replicates
                << " traces and summary.csv to " << out_path << "\n";
      if (compare->parsed()) {
        std::vector<PolicySummary> ranked = result.summary;
        std::sort(ranked.begin(), ranked.end(),
                  [](const PolicySummary& a, const PolicySummary& b) {
                    return a.mean_final_regret < b.mean_final_regret;
                  });
        std::cout << "ranking by mean final cumulative regret ("
                  << cfg.replicates << " replicates):\n";
        for (std::size_t i = 0; i < ranked.size(); ++i)
          std::cout << "  " << i + 1 << ". " << ranked[i].policy << "  "
                    << ranked[i].mean_final_regret << " +- "
                    << ranked[i].std_final_regret << "\n";
      }
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}

}  // namespace specband
