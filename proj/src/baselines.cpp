#include "upac/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "upac/agent.hpp"
#include "upac/confidence.hpp"

namespace upac {

double logn_width(std::uint64_t n, std::size_t S, std::size_t A, std::size_t H, double delta) {
  if (!(delta > 0.0 && delta <= 1.0)) throw std::invalid_argument("delta must lie in (0, 1]");
  if (n == 0) return std::numeric_limits<double>::infinity();
  const double nd = static_cast<double>(n);
  const double log_n = std::log(std::max(nd, std::numbers::e));
  const double log_sah = std::log(18.0 * static_cast<double>(S * A * H) / delta);
  return std::sqrt((2.0 * log_n + log_sah) / nd);
}

PlanResult plan_logT(const VisitCounters& counters, double delta, std::uint64_t T) {
  const std::size_t S = counters.num_states(), A = counters.num_actions(), H = counters.horizon();
  return plan_optimistic(counters,
                         [=](std::uint64_t n) { return logT_width(n, T, S, A, H, delta); });
}

PlanResult plan_logn(const VisitCounters& counters, double delta) {
  const std::size_t S = counters.num_states(), A = counters.num_actions(), H = counters.horizon();
  return plan_optimistic(counters, [=](std::uint64_t n) { return logn_width(n, S, A, H, delta); });
}

Policy random_policy(std::size_t num_states, std::size_t num_actions, std::size_t horizon, Rng& rng) {
  Policy policy(num_states, horizon);
  for (std::size_t t = 0; t < horizon; ++t)
    for (std::size_t s = 0; s < num_states; ++s)
      policy.set_action(s, t, rng.uniform_index(num_actions));
  return policy;
}

RunLog random_agent(const TabularMDP& mdp, std::uint64_t num_episodes, Rng& rng) {
  AgentOptions options;
  options.algorithm = Algorithm::Random;
  return run_agent(mdp, num_episodes, options, rng);
}

}  // namespace upac
