#pragma once

// Optimistic backward-induction planning on visit statistics.

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "upac/mdp.hpp"

namespace upac {

/// Visit statistics of an episodic agent.
///
///   n(s,a,t)      visits of (s,a) at step t
///   m(s',s,a,t)   transitions to s' out of those visits
///   l(s,a,t)      summed rewards out of those visits
///
/// Invariants: sum_{s'} m(s',s,a,t) = n(s,a,t); 0 <= l <= n; after k episodes
/// sum_{s,a} n(s,a,t) = k for every t.
class VisitCounters {
 public:
  VisitCounters(std::size_t num_states, std::size_t num_actions, std::size_t horizon);

  /// Builds counters from raw next-state counts m[s][a][t][s'] and reward sums
  /// l[s][a][t]; n is derived from m. Throws std::invalid_argument if the
  /// invariants do not hold.
  static VisitCounters from_raw(std::size_t num_states, std::size_t num_actions,
                                std::size_t horizon, std::vector<std::uint64_t> next_counts,
                                std::vector<double> reward_sums);

  std::size_t num_states() const { return S_; }
  std::size_t num_actions() const { return A_; }
  std::size_t horizon() const { return H_; }
  std::uint64_t episodes() const { return episodes_; }

  std::uint64_t n(std::size_t s, std::size_t a, std::size_t t) const { return n_[sat(s, a, t)]; }
  std::uint64_t m(std::size_t next, std::size_t s, std::size_t a, std::size_t t) const {
    return m_[sat(s, a, t) * S_ + next];
  }
  double l(std::size_t s, std::size_t a, std::size_t t) const { return l_[sat(s, a, t)]; }
  /// m(., s, a, t) as a contiguous row.
  std::span<const std::uint64_t> next_counts(std::size_t s, std::size_t a, std::size_t t) const {
    return {m_.data() + sat(s, a, t) * S_, S_};
  }

  /// Throws std::invalid_argument naming the first broken invariant.
  void check_consistent() const;

  friend void update(VisitCounters& counters, const Trajectory& traj);
  friend bool operator==(const VisitCounters&, const VisitCounters&) = default;

 private:
  std::size_t sat(std::size_t s, std::size_t a, std::size_t t) const { return (s * A_ + a) * H_ + t; }

  std::size_t S_, A_, H_;
  std::uint64_t episodes_ = 0;
  std::vector<std::uint64_t> n_;  // [s][a][t]
  std::vector<std::uint64_t> m_;  // [s][a][t][s']
  std::vector<double> l_;         // [s][a][t]
};

/// Applies n++, m(s_{t+1}, s_t, a_t, t)++, l += r_t for every step. The
/// trajectory is checked in full before anything is modified; out-of-range
/// indices or a wrong length throw std::out_of_range.
void update(VisitCounters& counters, const Trajectory& traj);

struct PlanResult {
  Policy policy;
  ValueFunction optimistic_values;
  std::size_t num_actions;
  std::vector<double> q;  // [t][s][a]

  double q_value(std::size_t t, std::size_t s, std::size_t a) const {
    return q[(t * optimistic_values.num_states() + s) * num_actions + a];
  }
};

/// Confidence width as a function of the visit count n. Must return +inf for
/// n = 0 (or any value; unvisited triples are clipped to full optimism anyway).
using WidthFn = std::function<double(std::uint64_t n)>;

/// Backward induction with
///   Q(a) = min{1, r^ + phi} + min{max V~_{t+1}, V^_next + (H - 1 - t) phi}
/// where phi = width(n), r^ = l/n and V^_next = m(.)^T V~_{t+1} / n (both 0
/// for n = 0). With zero-based t, H - 1 - t counts the steps after the current one.
/// With known_rewards set, the first term is replaced by the true reward
/// mean. Argmax ties go to the lowest action index.
PlanResult plan_optimistic(const VisitCounters& counters, const WidthFn& width,
                           const TabularMDP* known_rewards = nullptr);

/// UBEV planning step: plan_optimistic with ubev_width.
PlanResult plan(const VisitCounters& counters, double delta);

}  // namespace upac
