#pragma once

// Contrast planners that differ from UBEV only in how the width grows.

#include <cstdint>

#include "upac/metrics.hpp"
#include "upac/ubev.hpp"

namespace upac {

/// Union-bound rate: ubev_width with 2 llnp(n) replaced by 2 ln(max{n, e}).
double logn_width(std::uint64_t n, std::size_t S, std::size_t A, std::size_t H, double delta);

/// Planning with logT_width(n, T, ...), T the current episode count.
PlanResult plan_logT(const VisitCounters& counters, double delta, std::uint64_t T);

/// Planning with logn_width.
PlanResult plan_logn(const VisitCounters& counters, double delta);

/// Uniformly random action for every (s, t).
Policy random_policy(std::size_t num_states, std::size_t num_actions, std::size_t horizon, Rng& rng);

/// Performance floor: a fresh random policy every episode.
RunLog random_agent(const TabularMDP& mdp, std::uint64_t num_episodes, Rng& rng);

}  // namespace upac
