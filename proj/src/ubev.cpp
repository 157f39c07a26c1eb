#include "upac/ubev.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

#include "upac/confidence.hpp"

namespace upac {

VisitCounters::VisitCounters(std::size_t num_states, std::size_t num_actions, std::size_t horizon)
    : S_(num_states), A_(num_actions), H_(horizon) {
  if (S_ == 0 || A_ == 0 || H_ == 0)
    throw std::invalid_argument("VisitCounters: dimensions must be positive");
  n_.assign(S_ * A_ * H_, 0);
  m_.assign(S_ * A_ * H_ * S_, 0);
  l_.assign(S_ * A_ * H_, 0.0);
}

VisitCounters VisitCounters::from_raw(std::size_t num_states, std::size_t num_actions,
                                      std::size_t horizon, std::vector<std::uint64_t> next_counts,
                                      std::vector<double> reward_sums) {
  VisitCounters c(num_states, num_actions, horizon);
  if (next_counts.size() != c.m_.size() || reward_sums.size() != c.l_.size())
    throw std::invalid_argument("VisitCounters::from_raw: array sizes do not match dimensions");
  c.m_ = std::move(next_counts);
  c.l_ = std::move(reward_sums);
  for (std::size_t i = 0; i < c.n_.size(); ++i) {
    std::uint64_t total = 0;
    for (std::size_t sn = 0; sn < c.S_; ++sn) total += c.m_[i * c.S_ + sn];
    c.n_[i] = total;
  }
  for (std::size_t s = 0; s < c.S_; ++s)
    for (std::size_t a = 0; a < c.A_; ++a) c.episodes_ += c.n(s, a, 0);
  c.check_consistent();
  return c;
}

void VisitCounters::check_consistent() const {
  for (std::size_t t = 0; t < H_; ++t) {
    std::uint64_t visits = 0;
    for (std::size_t s = 0; s < S_; ++s)
      for (std::size_t a = 0; a < A_; ++a) {
        const std::size_t i = sat(s, a, t);
        visits += n_[i];
        std::uint64_t marginal = 0;
        for (std::size_t sn = 0; sn < S_; ++sn) marginal += m_[i * S_ + sn];
        std::ostringstream where;
        where << "(s=" << s << ", a=" << a << ", t=" << t << ")";
        if (marginal != n_[i])
          throw std::invalid_argument("VisitCounters: next-state counts do not sum to n at " +
                                      where.str());
        if (!(l_[i] >= 0.0 && l_[i] <= static_cast<double>(n_[i])))
          throw std::invalid_argument("VisitCounters: reward sum outside [0, n] at " + where.str());
      }
    if (visits != episodes_) {
      std::ostringstream os;
      os << "VisitCounters: step " << t << " has " << visits << " visits but " << episodes_
         << " episodes were recorded";
      throw std::invalid_argument(os.str());
    }
  }
}

void update(VisitCounters& c, const Trajectory& traj) {
  if (traj.size() != c.H_) throw std::out_of_range("update: trajectory length differs from horizon");
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const Step& st = traj[i];
    if (st.t != i || st.state >= c.S_ || st.action >= c.A_ || st.next_state >= c.S_)
      throw std::out_of_range("update: step " + std::to_string(i) + " has out-of-range indices");
    if (!(st.reward >= 0.0 && st.reward <= 1.0))
      throw std::out_of_range("update: step " + std::to_string(i) + " reward outside [0,1]");
  }
  for (const Step& st : traj) {
    const std::size_t i = c.sat(st.state, st.action, st.t);
    ++c.n_[i];
    ++c.m_[i * c.S_ + st.next_state];
    c.l_[i] += st.reward;
  }
  ++c.episodes_;
}

PlanResult plan_optimistic(const VisitCounters& counters, const WidthFn& width,
                           const TabularMDP* known_rewards) {
  counters.check_consistent();
  const std::size_t S = counters.num_states(), A = counters.num_actions(), H = counters.horizon();
  if (known_rewards && (known_rewards->num_states() != S || known_rewards->num_actions() != A ||
                        known_rewards->horizon() != H))
    throw std::invalid_argument("plan: known-reward MDP dimensions differ from counters");

  PlanResult out{Policy(S, H), ValueFunction(S, H), A, std::vector<double>(H * S * A, 0.0)};
  auto& v = out.optimistic_values;
  for (std::size_t t = H; t-- > 0;) {
    const auto next = v.row(t + 1);
    const double next_max = *std::max_element(next.begin(), next.end());
    const double steps_after = static_cast<double>(H - 1 - t);
    for (std::size_t s = 0; s < S; ++s) {
      std::size_t best_a = 0;
      double best_q = 0.0;
      for (std::size_t a = 0; a < A; ++a) {
        const std::uint64_t n = counters.n(s, a, t);
        const double phi = width(n);
        double r_hat = 0.0, v_next = 0.0;
        if (n > 0) {
          const double inv_n = 1.0 / static_cast<double>(n);
          r_hat = counters.l(s, a, t) * inv_n;
          const auto m = counters.next_counts(s, a, t);
          double acc = 0.0;
          for (std::size_t sn = 0; sn < S; ++sn) acc += static_cast<double>(m[sn]) * next[sn];
          v_next = acc * inv_n;
        }
        const double reward_term =
            known_rewards ? known_rewards->reward_mean(s, a, t) : std::min(1.0, r_hat + phi);
        // No bonus on the last step: avoids 0 * inf when n = 0.
        const double bonus = steps_after == 0.0 ? 0.0 : steps_after * phi;
        const double q = reward_term + std::min(next_max, v_next + bonus);
        out.q[(t * S + s) * A + a] = q;
        if (a == 0 || q > best_q) {
          best_q = q;
          best_a = a;
        }
      }
      v(t, s) = best_q;
      out.policy.set_action(s, t, best_a);
    }
  }
  return out;
}

PlanResult plan(const VisitCounters& counters, double delta) {
  const std::size_t S = counters.num_states(), A = counters.num_actions(), H = counters.horizon();
  return plan_optimistic(counters,
                         [=](std::uint64_t n) { return ubev_width(n, S, A, H, delta); });
}

}  // namespace upac
