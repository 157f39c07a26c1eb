#include "upac/mdp.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace upac {

namespace {

using nlohmann::json;

std::string describe_sat(std::size_t s, std::size_t a, std::size_t t) {
  std::ostringstream os;
  os << "(s=" << s << ", a=" << a << ", t=" << t << ")";
  return os.str();
}

// Empty string if the vector is a distribution, otherwise the reason.
std::string check_distribution(std::span<const double> p) {
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (!std::isfinite(p[i]) || p[i] < 0.0) {
      std::ostringstream os;
      os << "entry " << i << " is " << p[i];
      return os.str();
    }
    sum += p[i];
  }
  if (std::abs(sum - 1.0) > kStructuralTol) {
    std::ostringstream os;
    os.precision(17);
    os << "sums to " << sum;
    return os.str();
  }
  return {};
}

void check_same_shape(const TabularMDP& a, const TabularMDP& b) {
  if (a.num_states() != b.num_states() || a.num_actions() != b.num_actions() ||
      a.horizon() != b.horizon())
    throw std::invalid_argument("MDP dimension mismatch");
}

void check_policy_shape(const TabularMDP& mdp, const Policy& policy) {
  if (policy.num_states() != mdp.num_states() || policy.horizon() != mdp.horizon())
    throw std::invalid_argument("policy dimensions do not match the MDP");
}

double dot(std::span<const double> p, std::span<const double> v) {
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) acc += p[i] * v[i];
  return acc;
}

}  // namespace

TabularMDP::TabularMDP(std::size_t num_states, std::size_t num_actions, std::size_t horizon)
    : S_(num_states), A_(num_actions), H_(horizon) {
  if (S_ == 0 || A_ == 0 || H_ == 0)
    throw std::invalid_argument("TabularMDP: states, actions and horizon must be positive");
  initial_.assign(S_, 1.0 / static_cast<double>(S_));
  transitions_.assign(S_ * A_ * H_ * S_, 1.0 / static_cast<double>(S_));
  rewards_.assign(S_ * A_ * H_, RewardModel{});
}

void TabularMDP::check_sat(std::size_t s, std::size_t a, std::size_t t) const {
  if (s >= S_ || a >= A_ || t >= H_)
    throw std::out_of_range("TabularMDP: index out of range " + describe_sat(s, a, t));
}

void TabularMDP::set_initial_dist(std::span<const double> p0) {
  if (p0.size() != S_) throw std::invalid_argument("initial distribution has wrong length");
  initial_.assign(p0.begin(), p0.end());
}

void TabularMDP::set_transition(std::size_t s, std::size_t a, std::size_t t,
                                std::span<const double> next) {
  check_sat(s, a, t);
  if (next.size() != S_) throw std::invalid_argument("transition vector has wrong length");
  std::copy(next.begin(), next.end(), transitions_.begin() + sat_index(s, a, t) * S_);
}

void TabularMDP::set_reward(std::size_t s, std::size_t a, std::size_t t, RewardModel model) {
  check_sat(s, a, t);
  rewards_[sat_index(s, a, t)] = model;
}

void validate(const TabularMDP& mdp) {
  if (auto why = check_distribution(mdp.initial_dist()); !why.empty())
    throw std::invalid_argument("initial distribution invalid: " + why);
  for (std::size_t s = 0; s < mdp.num_states(); ++s)
    for (std::size_t a = 0; a < mdp.num_actions(); ++a)
      for (std::size_t t = 0; t < mdp.horizon(); ++t) {
        if (auto why = check_distribution(mdp.transition(s, a, t)); !why.empty())
          throw std::invalid_argument("transition " + describe_sat(s, a, t) + " invalid: " + why);
        const double mean = mdp.reward_mean(s, a, t);
        if (!(mean >= 0.0 && mean <= 1.0)) {
          std::ostringstream os;
          os << "reward mean " << describe_sat(s, a, t) << " is " << mean << ", outside [0,1]";
          throw std::invalid_argument(os.str());
        }
      }
}

ValueFunction evaluate_policy(const TabularMDP& mdp, const Policy& policy) {
  check_policy_shape(mdp, policy);
  const std::size_t S = mdp.num_states(), H = mdp.horizon();
  ValueFunction v(S, H);
  for (std::size_t t = H; t-- > 0;) {
    const auto next = v.row(t + 1);
    for (std::size_t s = 0; s < S; ++s) {
      const std::size_t a = policy.action(s, t);
      v(t, s) = mdp.reward_mean(s, a, t) + dot(mdp.transition(s, a, t), next);
    }
  }
  return v;
}

OptimalSolution optimal_values(const TabularMDP& mdp) {
  const std::size_t S = mdp.num_states(), A = mdp.num_actions(), H = mdp.horizon();
  OptimalSolution sol{ValueFunction(S, H), Policy(S, H)};
  for (std::size_t t = H; t-- > 0;) {
    const auto next = sol.values.row(t + 1);
    for (std::size_t s = 0; s < S; ++s) {
      std::size_t best_a = 0;
      double best_q = 0.0;
      for (std::size_t a = 0; a < A; ++a) {
        const double q = mdp.reward_mean(s, a, t) + dot(mdp.transition(s, a, t), next);
        if (a == 0 || q > best_q) {
          best_q = q;
          best_a = a;
        }
      }
      sol.values(t, s) = best_q;
      sol.policy.set_action(s, t, best_a);
    }
  }
  return sol;
}

double expected_return(const TabularMDP& mdp, const Policy& policy) {
  return dot(mdp.initial_dist(), evaluate_policy(mdp, policy).row(0));
}

OccupancyWeights occupancy_weights(const TabularMDP& mdp, const Policy& policy) {
  check_policy_shape(mdp, policy);
  const std::size_t S = mdp.num_states(), A = mdp.num_actions(), H = mdp.horizon();
  OccupancyWeights w(S, A, H);
  std::vector<double> state_prob(mdp.initial_dist().begin(), mdp.initial_dist().end());
  std::vector<double> next_prob(S);
  for (std::size_t t = 0; t < H; ++t) {
    std::fill(next_prob.begin(), next_prob.end(), 0.0);
    for (std::size_t s = 0; s < S; ++s) {
      const std::size_t a = policy.action(s, t);
      w(t, s, a) = state_prob[s];
      if (state_prob[s] == 0.0) continue;
      const auto p = mdp.transition(s, a, t);
      for (std::size_t sn = 0; sn < S; ++sn) next_prob[sn] += state_prob[s] * p[sn];
    }
    state_prob.swap(next_prob);
  }
  return w;
}

ValueDifference value_difference(const TabularMDP& mdp_a, const TabularMDP& mdp_b,
                                 const Policy& policy) {
  check_same_shape(mdp_a, mdp_b);
  const std::size_t S = mdp_a.num_states(), A = mdp_a.num_actions(), H = mdp_a.horizon();
  const ValueFunction va = evaluate_policy(mdp_a, policy);
  const OccupancyWeights wb = occupancy_weights(mdp_b, policy);

  ValueDifference out;
  for (std::size_t t = 0; t < H; ++t) {
    const auto next = va.row(t + 1);
    for (std::size_t s = 0; s < S; ++s)
      for (std::size_t a = 0; a < A; ++a) {
        const double w = wb(t, s, a);
        if (w == 0.0) continue;
        out.reward_term += w * (mdp_a.reward_mean(s, a, t) - mdp_b.reward_mean(s, a, t));
        const auto pa = mdp_a.transition(s, a, t);
        const auto pb = mdp_b.transition(s, a, t);
        double diff = 0.0;
        for (std::size_t sn = 0; sn < S; ++sn) diff += (pa[sn] - pb[sn]) * next[sn];
        out.transition_term += w * diff;
      }
  }
  out.total = out.reward_term + out.transition_term;
  return out;
}

Trajectory sample_episode(const TabularMDP& mdp, const Policy& policy, Rng& rng) {
  check_policy_shape(mdp, policy);
  Trajectory traj;
  traj.reserve(mdp.horizon());
  std::size_t s = rng.categorical(mdp.initial_dist());
  for (std::size_t t = 0; t < mdp.horizon(); ++t) {
    const std::size_t a = policy.action(s, t);
    const double r = mdp.reward(s, a, t).sample(rng);
    const std::size_t next = rng.categorical(mdp.transition(s, a, t));
    traj.push_back(Step{t, s, a, r, next});
    s = next;
  }
  return traj;
}

std::string to_json(const TabularMDP& mdp, int indent) {
  const std::size_t S = mdp.num_states(), A = mdp.num_actions(), H = mdp.horizon();
  json doc;
  doc["num_states"] = S;
  doc["num_actions"] = A;
  doc["horizon"] = H;
  doc["initial_dist"] = std::vector<double>(mdp.initial_dist().begin(), mdp.initial_dist().end());
  json transitions = json::array();
  json rewards = json::array();
  for (std::size_t s = 0; s < S; ++s) {
    json ts = json::array(), rs = json::array();
    for (std::size_t a = 0; a < A; ++a) {
      json ta = json::array(), ra = json::array();
      for (std::size_t t = 0; t < H; ++t) {
        const auto p = mdp.transition(s, a, t);
        ta.push_back(std::vector<double>(p.begin(), p.end()));
        const auto& r = mdp.reward(s, a, t);
        ra.push_back({{"kind", r.kind == RewardModel::Kind::Deterministic ? "deterministic"
                                                                          : "bernoulli"},
                      {"mean", r.mean}});
      }
      ts.push_back(std::move(ta));
      rs.push_back(std::move(ra));
    }
    transitions.push_back(std::move(ts));
    rewards.push_back(std::move(rs));
  }
  doc["transitions"] = std::move(transitions);
  doc["rewards"] = std::move(rewards);
  return doc.dump(indent);
}

TabularMDP mdp_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("MDP JSON: ") + e.what());
  }
  try {
    const auto S = doc.at("num_states").get<std::size_t>();
    const auto A = doc.at("num_actions").get<std::size_t>();
    const auto H = doc.at("horizon").get<std::size_t>();
    TabularMDP mdp(S, A, H);
    mdp.set_initial_dist(doc.at("initial_dist").get<std::vector<double>>());
    const auto& transitions = doc.at("transitions");
    const auto& rewards = doc.at("rewards");
    if (transitions.size() != S || rewards.size() != S)
      throw std::invalid_argument("MDP JSON: transitions/rewards must have num_states entries");
    for (std::size_t s = 0; s < S; ++s) {
      if (transitions[s].size() != A || rewards[s].size() != A)
        throw std::invalid_argument("MDP JSON: expected num_actions entries per state");
      for (std::size_t a = 0; a < A; ++a) {
        if (transitions[s][a].size() != H || rewards[s][a].size() != H)
          throw std::invalid_argument("MDP JSON: expected horizon entries per state-action");
        for (std::size_t t = 0; t < H; ++t) {
          mdp.set_transition(s, a, t, transitions[s][a][t].get<std::vector<double>>());
          const auto& r = rewards[s][a][t];
          const auto kind = r.at("kind").get<std::string>();
          RewardModel model;
          if (kind == "deterministic")
            model.kind = RewardModel::Kind::Deterministic;
          else if (kind == "bernoulli")
            model.kind = RewardModel::Kind::Bernoulli;
          else
            throw std::invalid_argument("MDP JSON: unknown reward kind '" + kind + "'");
          model.mean = r.at("mean").get<double>();
          mdp.set_reward(s, a, t, model);
        }
      }
    }
    validate(mdp);
    return mdp;
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("MDP JSON: ") + e.what());
  }
}

std::uint64_t mdp_digest(const TabularMDP& mdp) { return fnv1a64(to_json(mdp)); }

}  // namespace upac
