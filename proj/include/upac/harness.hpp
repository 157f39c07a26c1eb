#pragma once

// Configuration-driven experiment runner.
//
// Config document (JSON, unknown fields rejected):
//
//   {
//     "mdp": {"random": {"states": 5, "actions": 3, "horizon": 10,
//                        "dirichlet_alpha": 0.1, "zero_reward_prob": 0.85,
//                        "seed": 0}}
//          | {"file": "path/to/mdp.json"},
//     "algorithms": ["ubev", "logT", "logn", "random"],
//     "seeds": [1, 2, 3],
//     "num_episodes": 100000,        // optional
//     "delta": 0.1,                  // optional
//     "epsilon_grid": [...],         // optional, default geometric grid
//     "log_every": 1,                // optional, CSV row cadence
//     "output_dir": "results",       // optional
//     "known_rewards": false,        // optional
//     "plan_every": 1,               // optional
//     "return_window": 1000,         // optional
//     "master_seed": 0,              // optional
//     "workers": 0                   // optional, 0 = all cores
//   }
//
// Outputs in output_dir: episodes.csv, summary.json, metadata.json, mdp.json.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "upac/agent.hpp"
#include "upac/envgen.hpp"
#include "upac/metrics.hpp"

namespace upac {

inline constexpr std::string_view kCsvHeader =
    "algorithm,seed,episode,delta_k,cum_regret,optimistic_value,return_window_mean";

/// Environment variable that overrides the configured worker count.
inline constexpr const char* kWorkersEnv = "UPAC_WORKERS";

struct MdpSource {
  std::optional<RandomMDPSpec> random;
  std::string file;

  friend bool operator==(const MdpSource&, const MdpSource&) = default;
};

struct ExperimentConfig {
  MdpSource mdp;
  std::vector<std::string> algorithms;
  std::vector<std::uint64_t> seeds;
  std::uint64_t num_episodes = 100000;
  double delta = 0.1;
  std::vector<double> epsilon_grid;  // empty: default_epsilon_grid(H)
  std::uint64_t log_every = 1;
  std::string output_dir = "results";
  bool known_rewards = false;
  std::uint64_t plan_every = 1;
  std::uint64_t return_window = 1000;
  std::uint64_t master_seed = 0;
  unsigned workers = 0;

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

/// Throws std::invalid_argument with line/column for syntax errors and the
/// offending field name for schema errors.
ExperimentConfig parse_config(const std::string& text);
std::string serialize_config(const ExperimentConfig& config);
/// Reads a config file; a relative mdp.file is resolved against the config's directory.
ExperimentConfig load_config(const std::filesystem::path& path);

/// Throws std::invalid_argument naming the violated constraint.
void validate(const ExperimentConfig& config);

TabularMDP load_mdp(const ExperimentConfig& config);

/// Stream for one (algorithm, seed) run: derived from (master_seed, algorithm, seed).
Rng run_rng(std::uint64_t master_seed, const std::string& algorithm, std::uint64_t seed);

/// One run of the matrix, exactly as run_experiment performs it.
RunLog run_single(const TabularMDP& mdp, const ExperimentConfig& config,
                  const std::string& algorithm, std::uint64_t seed,
                  std::span<const EpisodeObserver> observers = {});

struct RunSummary {
  std::string algorithm;
  std::uint64_t seed = 0;
  std::uint64_t T = 0;
  double regret = 0.0;
  MistakeCurve mistake_curve;
  std::optional<std::uint64_t> optimism_violations;  // empty for agents without optimism
  double final_window_mean_return = 0.0;
};

struct ExperimentReport {
  double rho_star = 0.0;
  std::vector<RunLog> logs;           // sorted by (algorithm, seed)
  std::vector<RunSummary> summaries;  // same order
  std::filesystem::path output_dir;
};

RunSummary summarize_run(const RunLog& log, std::span<const double> epsilon_grid,
                         std::uint64_t return_window);

/// Runs every (algorithm, seed) pair, in parallel, then writes outputs in
/// sorted key order. Output bytes of episodes.csv and summary.json depend only
/// on the config.
ExperimentReport run_experiment(const ExperimentConfig& config);

/// Worker count after applying the environment override.
unsigned effective_workers(const ExperimentConfig& config);

/// CSV body for the given logs (header included).
std::string episodes_csv(std::span<const RunLog> logs, std::uint64_t log_every,
                         std::uint64_t return_window);

/// Shortest decimal that parses back to the same double.
std::string format_double(double x);

/// Collects every summary.json under dir into one JSON array.
std::string summarize_directory(const std::filesystem::path& dir);

}  // namespace upac
