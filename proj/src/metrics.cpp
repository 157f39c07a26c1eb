#include "upac/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace upac {

double optimality_gap(const TabularMDP& mdp, const Policy& policy) {
  const auto opt = optimal_values(mdp);
  return optimality_gap(mdp, policy, expected_return(mdp, opt.policy));
}

double optimality_gap(const TabularMDP& mdp, const Policy& policy, double rho_star) {
  const double gap = rho_star - expected_return(mdp, policy);
  if (gap < 0.0 && gap > -kGapTol) return 0.0;
  return gap;
}

MistakeCurve mistake_counts(const RunLog& log, std::span<const double> epsilon_grid,
                            std::uint64_t T) {
  if (T > log.size()) throw std::invalid_argument("mistake_counts: T exceeds log length");
  for (std::size_t i = 0; i < epsilon_grid.size(); ++i) {
    if (!(epsilon_grid[i] > 0.0))
      throw std::invalid_argument("mistake_counts: epsilon grid must be positive");
    if (i > 0 && !(epsilon_grid[i] > epsilon_grid[i - 1]))
      throw std::invalid_argument("mistake_counts: epsilon grid must be strictly increasing");
  }
  MistakeCurve curve{{epsilon_grid.begin(), epsilon_grid.end()},
                     std::vector<std::uint64_t>(epsilon_grid.size(), 0), T};
  for (std::uint64_t k = 0; k < T; ++k) {
    const double gap = log.records[k].delta_k;
    for (std::size_t i = 0; i < epsilon_grid.size(); ++i) {
      if (!(gap > epsilon_grid[i] + kGapTol)) break;  // grid ascending
      ++curve.counts[i];
    }
  }
  return curve;
}

double regret(const RunLog& log, std::uint64_t T) {
  if (T > log.size()) throw std::invalid_argument("regret: T exceeds log length");
  double total = 0.0;
  for (std::uint64_t k = 0; k < T; ++k) total += log.records[k].delta_k;
  return total;
}

std::uint64_t optimism_violations(const RunLog& log, double rho_star, double tol) {
  std::uint64_t count = 0;
  for (const auto& r : log.records)
    if (r.optimistic_value < rho_star - tol) ++count;
  return count;
}

std::vector<double> default_epsilon_grid(std::size_t horizon, std::size_t points, double ratio) {
  std::vector<double> grid(points);
  const double hi = static_cast<double>(horizon);
  if (points == 1) return {hi};
  for (std::size_t i = 0; i < points; ++i) {
    const double frac = static_cast<double>(i) / static_cast<double>(points - 1);
    grid[i] = hi / ratio * std::pow(ratio, frac);
  }
  grid.back() = hi;
  return grid;
}

}  // namespace upac
