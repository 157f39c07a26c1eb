#include "upac/envgen.hpp"

#include <stdexcept>

namespace upac {

void validate(const RandomMDPSpec& spec) {
  if (spec.num_states == 0 || spec.num_actions == 0 || spec.horizon == 0)
    throw std::invalid_argument("RandomMDPSpec: states, actions and horizon must be >= 1");
  if (!(spec.dirichlet_alpha > 0.0))
    throw std::invalid_argument("RandomMDPSpec: dirichlet_alpha must be positive");
  if (!(spec.zero_reward_prob >= 0.0 && spec.zero_reward_prob <= 1.0))
    throw std::invalid_argument("RandomMDPSpec: zero_reward_prob must lie in [0,1]");
}

std::vector<double> sample_dirichlet(std::size_t dim, double alpha, Rng& rng) {
  std::vector<double> row(dim);
  for (;;) {
    double sum = 0.0;
    for (auto& x : row) {
      x = rng.gamma(alpha);
      sum += x;
    }
    if (sum > 0.0) {
      for (auto& x : row) x /= sum;
      return row;
    }
  }
}

TabularMDP random_mdp(const RandomMDPSpec& spec) {
  validate(spec);
  Rng rng(spec.seed);
  TabularMDP mdp(spec.num_states, spec.num_actions, spec.horizon);
  for (std::size_t s = 0; s < spec.num_states; ++s)
    for (std::size_t a = 0; a < spec.num_actions; ++a)
      for (std::size_t t = 0; t < spec.horizon; ++t) {
        mdp.set_transition(s, a, t, sample_dirichlet(spec.num_states, spec.dirichlet_alpha, rng));
        const bool zero = rng.uniform() < spec.zero_reward_prob;
        const double mean = zero ? 0.0 : rng.uniform();
        mdp.set_reward(s, a, t, RewardModel{RewardModel::Kind::Deterministic, mean});
      }
  return mdp;
}

std::pair<TabularMDP, TabularMDP> hard_bandit_pair(double alpha) {
  if (!(alpha > 0.0 && alpha < 0.25))
    throw std::invalid_argument("hard_bandit_pair: alpha must lie in (0, 1/4)");
  constexpr auto kBern = RewardModel::Kind::Bernoulli;
  TabularMDP m1(1, 2, 1), m2(1, 2, 1);
  m1.set_reward(0, 0, 0, {kBern, 0.5 + alpha / 2.0});
  m2.set_reward(0, 0, 0, {kBern, 0.5 + alpha / 2.0});
  m1.set_reward(0, 1, 0, {kBern, 0.5});
  m2.set_reward(0, 1, 0, {kBern, 0.5 + alpha});
  return {std::move(m1), std::move(m2)};
}

}  // namespace upac
