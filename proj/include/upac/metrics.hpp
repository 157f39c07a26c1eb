#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "upac/mdp.hpp"

namespace upac {

/// Gaps this close to a threshold are not counted as mistakes, and negative
/// gaps this close to zero are clamped.
inline constexpr double kGapTol = 1e-10;

struct EpisodeRecord {
  std::uint64_t k = 0;           // 1-based episode index
  double delta_k = 0.0;          // rho* - rho^{pi_k}, exact
  double policy_return = 0.0;    // rho^{pi_k}
  double optimistic_value = 0.0; // p0^T V~_1 (NaN for agents without one)
  std::int64_t wall_ns = 0;

  friend bool operator==(const EpisodeRecord&, const EpisodeRecord&) = default;
};

struct RunMetadata {
  std::string algorithm;
  std::uint64_t seed = 0;
  std::uint64_t mdp_digest = 0;
  double delta = 0.0;
  std::string rng;
  double rho_star = 0.0;
  std::size_t horizon = 0;
  std::uint64_t plan_every = 1;
  bool known_rewards = false;
};

struct RunLog {
  RunMetadata meta;
  std::vector<EpisodeRecord> records;

  std::size_t size() const { return records.size(); }
};

struct MistakeCurve {
  std::vector<double> epsilon_grid;
  std::vector<std::uint64_t> counts;
  std::uint64_t T = 0;
};

/// rho* - rho^pi, with values in (-kGapTol, 0) clamped to 0.
double optimality_gap(const TabularMDP& mdp, const Policy& policy);
/// Same with a precomputed optimal return.
double optimality_gap(const TabularMDP& mdp, const Policy& policy, double rho_star);

/// counts[i] = #{k <= T : delta_k > eps_i + kGapTol}. Throws on an unsorted or
/// nonpositive grid, or T beyond the log.
MistakeCurve mistake_counts(const RunLog& log, std::span<const double> epsilon_grid,
                            std::uint64_t T);

/// Sum of delta_k over the first T episodes.
double regret(const RunLog& log, std::uint64_t T);

/// #{k : optimistic_value_k < rho_star - tol}.
std::uint64_t optimism_violations(const RunLog& log, double rho_star, double tol);

/// Geometric grid of `points` values from horizon/ratio up to horizon, ascending.
std::vector<double> default_epsilon_grid(std::size_t horizon, std::size_t points = 16,
                                         double ratio = 1e3);

}  // namespace upac
