#pragma once

// Episodic fixed-horizon tabular MDPs with time-dependent dynamics.
//
// Indexing is zero-based throughout: states s in [0, S), actions a in [0, A),
// steps t in [0, H). Value tables carry an extra terminal row t = H that is
// identically zero.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "upac/rng.hpp"

namespace upac {

inline constexpr double kStructuralTol = 1e-12;

struct RewardModel {
  enum class Kind { Deterministic, Bernoulli };
  Kind kind = Kind::Deterministic;
  double mean = 0.0;

  double sample(Rng& rng) const {
    if (kind == Kind::Deterministic) return mean;
    return rng.bernoulli(mean) ? 1.0 : 0.0;
  }

  friend bool operator==(const RewardModel&, const RewardModel&) = default;
};

/// Full description of an episodic MDP. Built once, then shared read-only.
///
/// A freshly constructed MDP has uniform initial distribution, uniform
/// transitions and deterministic zero rewards, which is valid; callers then
/// overwrite entries through the setters.
class TabularMDP {
 public:
  TabularMDP(std::size_t num_states, std::size_t num_actions, std::size_t horizon);

  std::size_t num_states() const { return S_; }
  std::size_t num_actions() const { return A_; }
  std::size_t horizon() const { return H_; }

  std::span<const double> initial_dist() const { return initial_; }
  /// Distribution of the next state after taking a in s at step t.
  std::span<const double> transition(std::size_t s, std::size_t a, std::size_t t) const {
    return {transitions_.data() + sat_index(s, a, t) * S_, S_};
  }
  const RewardModel& reward(std::size_t s, std::size_t a, std::size_t t) const {
    return rewards_[sat_index(s, a, t)];
  }
  double reward_mean(std::size_t s, std::size_t a, std::size_t t) const {
    return rewards_[sat_index(s, a, t)].mean;
  }

  void set_initial_dist(std::span<const double> p0);
  void set_transition(std::size_t s, std::size_t a, std::size_t t, std::span<const double> next);
  void set_reward(std::size_t s, std::size_t a, std::size_t t, RewardModel model);

  friend bool operator==(const TabularMDP&, const TabularMDP&) = default;

 private:
  std::size_t sat_index(std::size_t s, std::size_t a, std::size_t t) const {
    return (s * A_ + a) * H_ + t;
  }
  void check_sat(std::size_t s, std::size_t a, std::size_t t) const;

  std::size_t S_, A_, H_;
  std::vector<double> initial_;
  std::vector<double> transitions_;  // [s][a][t][s']
  std::vector<RewardModel> rewards_;  // [s][a][t]
};

/// Deterministic time-dependent policy: one action per (state, step).
class Policy {
 public:
  Policy(std::size_t num_states, std::size_t horizon, std::size_t fill_action = 0)
      : S_(num_states), H_(horizon), actions_(num_states * horizon, fill_action) {}

  std::size_t num_states() const { return S_; }
  std::size_t horizon() const { return H_; }
  std::size_t action(std::size_t s, std::size_t t) const { return actions_[t * S_ + s]; }
  void set_action(std::size_t s, std::size_t t, std::size_t a) { actions_[t * S_ + s] = a; }

  friend bool operator==(const Policy&, const Policy&) = default;

 private:
  std::size_t S_, H_;
  std::vector<std::size_t> actions_;  // [t][s]
};

/// V[t][s] for t in [0, H]; row H is the zero terminal row.
class ValueFunction {
 public:
  ValueFunction(std::size_t num_states, std::size_t horizon)
      : S_(num_states), H_(horizon), values_((horizon + 1) * num_states, 0.0) {}

  std::size_t num_states() const { return S_; }
  std::size_t horizon() const { return H_; }
  double operator()(std::size_t t, std::size_t s) const { return values_[t * S_ + s]; }
  double& operator()(std::size_t t, std::size_t s) { return values_[t * S_ + s]; }
  std::span<const double> row(std::size_t t) const { return {values_.data() + t * S_, S_}; }

  friend bool operator==(const ValueFunction&, const ValueFunction&) = default;

 private:
  std::size_t S_, H_;
  std::vector<double> values_;
};

/// w[t][s][a]: probability that (s_t, a_t) = (s, a) when following a policy.
class OccupancyWeights {
 public:
  OccupancyWeights(std::size_t num_states, std::size_t num_actions, std::size_t horizon)
      : S_(num_states), A_(num_actions), H_(horizon), w_(horizon * num_states * num_actions, 0.0) {}

  std::size_t num_states() const { return S_; }
  std::size_t num_actions() const { return A_; }
  std::size_t horizon() const { return H_; }
  double operator()(std::size_t t, std::size_t s, std::size_t a) const {
    return w_[(t * S_ + s) * A_ + a];
  }
  double& operator()(std::size_t t, std::size_t s, std::size_t a) { return w_[(t * S_ + s) * A_ + a]; }

 private:
  std::size_t S_, A_, H_;
  std::vector<double> w_;
};

struct Step {
  std::size_t t;
  std::size_t state;
  std::size_t action;
  double reward;
  std::size_t next_state;
};

using Trajectory = std::vector<Step>;

struct OptimalSolution {
  ValueFunction values;
  Policy policy;
};

struct ValueDifference {
  double total = 0.0;
  double reward_term = 0.0;
  double transition_term = 0.0;
};

/// Throws std::invalid_argument naming the first violated invariant.
void validate(const TabularMDP& mdp);

/// Exact backward induction for a fixed policy.
ValueFunction evaluate_policy(const TabularMDP& mdp, const Policy& policy);

/// Optimal values and a greedy policy; ties go to the lowest action index.
OptimalSolution optimal_values(const TabularMDP& mdp);

/// p0^T V^pi_1.
double expected_return(const TabularMDP& mdp, const Policy& policy);

/// Forward recursion of state-action visitation probabilities.
OccupancyWeights occupancy_weights(const TabularMDP& mdp, const Policy& policy);

/// Splits p0^T (V'_1 - V''_1) for mdp_a = M', mdp_b = M'' into the reward and
/// transition terms of the value difference identity. Occupancies and the
/// initial distribution are taken from mdp_b.
ValueDifference value_difference(const TabularMDP& mdp_a, const TabularMDP& mdp_b,
                                 const Policy& policy);

/// One episode of exactly H steps.
Trajectory sample_episode(const TabularMDP& mdp, const Policy& policy, Rng& rng);

/// JSON document: {num_states, num_actions, horizon, initial_dist,
/// transitions[s][a][t][s'], rewards[s][a][t] = {kind, mean}}.
std::string to_json(const TabularMDP& mdp, int indent = -1);
/// Parses and validates.
TabularMDP mdp_from_json(const std::string& text);

/// 64-bit digest of the compact JSON form, for run metadata.
std::uint64_t mdp_digest(const TabularMDP& mdp);

}  // namespace upac
