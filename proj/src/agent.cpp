#include "upac/agent.hpp"

#include <algorithm>
#include <chrono>
#include <limits>
#include <stdexcept>

#include "upac/baselines.hpp"
#include "upac/confidence.hpp"

namespace upac {

std::string to_string(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::Ubev: return "ubev";
    case Algorithm::LogT: return "logT";
    case Algorithm::LogN: return "logn";
    case Algorithm::Random: return "random";
  }
  return "?";
}

Algorithm algorithm_from_string(const std::string& name) {
  for (auto a : {Algorithm::Ubev, Algorithm::LogT, Algorithm::LogN, Algorithm::Random})
    if (to_string(a) == name) return a;
  throw std::invalid_argument("unknown algorithm '" + name + "'");
}

RunLog run_agent(const TabularMDP& mdp, std::uint64_t num_episodes, const AgentOptions& options,
                 Rng& rng, std::span<const EpisodeObserver> observers) {
  validate(mdp);
  if (options.plan_every == 0) throw std::invalid_argument("plan_every must be >= 1");
  const std::size_t S = mdp.num_states(), A = mdp.num_actions(), H = mdp.horizon();
  const double width_delta = options.known_rewards ? std::min(1.0, options.delta * 9.0 / 7.0)
                                                   : options.delta;
  const TabularMDP* known = options.known_rewards ? &mdp : nullptr;
  const auto p0 = mdp.initial_dist();

  const auto optimal = optimal_values(mdp);
  const double rho_star = expected_return(mdp, optimal.policy);

  RunLog log;
  log.meta.algorithm = to_string(options.algorithm);
  log.meta.mdp_digest = mdp_digest(mdp);
  log.meta.delta = options.delta;
  log.meta.rng = std::string(kRngIdentifier);
  log.meta.rho_star = rho_star;
  log.meta.horizon = H;
  log.meta.plan_every = options.plan_every;
  log.meta.known_rewards = options.known_rewards;
  log.records.reserve(num_episodes);

  VisitCounters counters(S, A, H);
  Policy policy(S, H);
  double optimistic_value = std::numeric_limits<double>::quiet_NaN();

  for (std::uint64_t k = 1; k <= num_episodes; ++k) {
    const auto start = std::chrono::steady_clock::now();
    if (options.algorithm == Algorithm::Random) {
      policy = random_policy(S, A, H, rng);
    } else if ((k - 1) % options.plan_every == 0) {
      PlanResult planned = [&] {
        switch (options.algorithm) {
          case Algorithm::LogT:
            return plan_optimistic(counters, [&](std::uint64_t n) {
              return logT_width(n, k, S, A, H, width_delta);
            }, known);
          case Algorithm::LogN:
            return plan_optimistic(counters, [&](std::uint64_t n) {
              return logn_width(n, S, A, H, width_delta);
            }, known);
          default:
            return plan_optimistic(counters, [&](std::uint64_t n) {
              return ubev_width(n, S, A, H, width_delta);
            }, known);
        }
      }();
      policy = std::move(planned.policy);
      optimistic_value = 0.0;
      const auto v1 = planned.optimistic_values.row(0);
      for (std::size_t s = 0; s < S; ++s) optimistic_value += p0[s] * v1[s];
    }

    EpisodeRecord rec;
    rec.k = k;
    rec.policy_return = expected_return(mdp, policy);
    rec.delta_k = rho_star - rec.policy_return;
    if (rec.delta_k < 0.0 && rec.delta_k > -kGapTol) rec.delta_k = 0.0;
    rec.optimistic_value = optimistic_value;
    for (const auto& obs : observers) obs(rec, policy);

    update(counters, sample_episode(mdp, policy, rng));
    rec.wall_ns = std::chrono::duration_cast<std::chrono::nanoseconds>(
                      std::chrono::steady_clock::now() - start).count();
    log.records.push_back(rec);
  }
  return log;
}

RunLog run_agent(const TabularMDP& mdp, std::uint64_t num_episodes, double delta, Rng& rng,
                 std::span<const EpisodeObserver> observers) {
  AgentOptions options;
  options.delta = delta;
  return run_agent(mdp, num_episodes, options, rng, observers);
}

}  // namespace upac
