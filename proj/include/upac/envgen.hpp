#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "upac/mdp.hpp"

namespace upac {

/// Parameters of the sparse-reward random MDP family: Dirichlet(alpha)
/// transition rows and deterministic rewards that are zero with probability
/// zero_reward_prob and Uniform[0,1] otherwise.
struct RandomMDPSpec {
  std::size_t num_states = 5;
  std::size_t num_actions = 3;
  std::size_t horizon = 10;
  double dirichlet_alpha = 0.1;
  double zero_reward_prob = 0.85;
  std::uint64_t seed = 0;

  friend bool operator==(const RandomMDPSpec&, const RandomMDPSpec&) = default;
};

void validate(const RandomMDPSpec& spec);

/// Symmetric Dirichlet draw via normalized Gamma(alpha, 1) variates. A row
/// whose Gamma draws all underflow to zero is redrawn.
std::vector<double> sample_dirichlet(std::size_t dim, double alpha, Rng& rng);

/// Deterministic function of spec.seed.
TabularMDP random_mdp(const RandomMDPSpec& spec);

/// Two single-state, single-step bandits that share arm 0 ~ Bernoulli(1/2 + alpha/2)
/// and differ in arm 1: Bernoulli(1/2) in the first, Bernoulli(1/2 + alpha) in
/// the second. Requires 0 < alpha < 1/4.
std::pair<TabularMDP, TabularMDP> hard_bandit_pair(double alpha);

}  // namespace upac
