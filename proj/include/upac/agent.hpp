#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>

#include "upac/metrics.hpp"
#include "upac/ubev.hpp"

namespace upac {

enum class Algorithm { Ubev, LogT, LogN, Random };

std::string to_string(Algorithm algorithm);
/// Accepts "ubev", "logT", "logn", "random". Throws std::invalid_argument otherwise.
Algorithm algorithm_from_string(const std::string& name);

struct AgentOptions {
  Algorithm algorithm = Algorithm::Ubev;
  double delta = 0.1;
  /// Plan with the true reward means instead of min{1, r^ + phi}; the delta
  /// inside the width is scaled by 9/7 (capped at 1) since no reward
  /// confidence interval is needed.
  bool known_rewards = false;
  /// Replan every j episodes. 1 replans every episode.
  std::uint64_t plan_every = 1;
};

/// Called once per episode, after planning and before the episode is played,
/// with the record and the policy that will be executed.
using EpisodeObserver = std::function<void(const EpisodeRecord&, const Policy&)>;

/// plan -> sample_episode -> update, num_episodes times. The gap of every
/// played policy is computed exactly against the optimal return. Deterministic
/// given the state of rng.
RunLog run_agent(const TabularMDP& mdp, std::uint64_t num_episodes, const AgentOptions& options,
                 Rng& rng, std::span<const EpisodeObserver> observers = {});

/// UBEV with default options.
RunLog run_agent(const TabularMDP& mdp, std::uint64_t num_episodes, double delta, Rng& rng,
                 std::span<const EpisodeObserver> observers = {});

}  // namespace upac
