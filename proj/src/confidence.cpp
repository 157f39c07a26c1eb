#include "upac/confidence.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <thread>
#include <vector>

namespace upac {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double lil_width(std::uint64_t n, double rate_term, double log_sah_term) {
  if (n == 0) return kInf;
  return std::sqrt((rate_term + log_sah_term) / static_cast<double>(n));
}

double log_18sah(std::size_t S, std::size_t A, std::size_t H, double delta) {
  return std::log(18.0 * static_cast<double>(S) * static_cast<double>(A) * static_cast<double>(H) /
                  delta);
}

void check_delta(double delta) {
  if (!(delta > 0.0 && delta <= 1.0)) throw std::invalid_argument("delta must lie in (0, 1]");
}

// Per-t violation thresholds on the integer-scaled statistic, computed once per
// verification run and shared read-only by all workers.
struct Prepared {
  BoundKind kind = BoundKind::UniformHoeffding;
  std::uint64_t max_t = 0;
  double mu = 0.5;
  std::uint64_t U = 2;
  double p = 0.5;
  double W = 0.0;
  std::vector<double> scaled;  // scaled[t] = t * radius(t), index 1..max_t
};

Prepared prepare(const BoundSpec& bound, std::uint64_t max_t) {
  Prepared prep;
  prep.kind = bound.kind;
  prep.max_t = max_t;
  const double delta = bound.parameter("delta");
  const double sigma = bound.parameter("sigma");
  prep.mu = bound.parameter("mu");
  prep.U = static_cast<std::uint64_t>(bound.parameter("U"));
  prep.p = bound.parameter("p");
  prep.W = bound.parameter("W");
  if (bound.kind == BoundKind::VisitationLower) return prep;

  const double fixed_radius = bound.parameter("radius");
  prep.scaled.assign(max_t + 1, 0.0);
  for (std::uint64_t t = 1; t <= max_t; ++t) {
    double r = 0.0;
    switch (bound.kind) {
      case BoundKind::UniformHoeffding:
        r = uniform_hoeffding_radius(t, sigma, delta);
        break;
      case BoundKind::UniformBernoulli:
        r = uniform_bernoulli_radius(t, prep.mu, delta);
        break;
      case BoundKind::UniformL1:
        r = uniform_l1_radius(t, prep.U, delta);
        break;
      case BoundKind::FixedTimeHoeffding:
        r = std::isnan(fixed_radius)
                ? std::sqrt(2.0 * sigma * sigma * std::log(2.0 / delta) / static_cast<double>(t))
                : fixed_radius;
        break;
      case BoundKind::LogTWidth: {
        const double log_T = std::log(std::max(static_cast<double>(max_t), std::numbers::e));
        r = std::sqrt(4.0 * sigma * sigma / static_cast<double>(t) *
                      (2.0 * log_T + std::log(3.0 / delta)));
        break;
      }
      case BoundKind::VisitationLower:
        break;
    }
    prep.scaled[t] = static_cast<double>(t) * r;
  }
  return prep;
}

bool trial_violates(const Prepared& prep, Rng& rng) {
  switch (prep.kind) {
    case BoundKind::UniformHoeffding:
    case BoundKind::UniformBernoulli:
    case BoundKind::FixedTimeHoeffding:
    case BoundKind::LogTWidth: {
      double sum = 0.0;
      for (std::uint64_t t = 1; t <= prep.max_t; ++t) {
        if (rng.uniform() < prep.mu) sum += 1.0;
        if (std::abs(sum - static_cast<double>(t) * prep.mu) >= prep.scaled[t]) return true;
      }
      return false;
    }
    case BoundKind::UniformL1: {
      std::vector<double> counts(prep.U, 0.0);
      const double share = 1.0 / static_cast<double>(prep.U);
      for (std::uint64_t t = 1; t <= prep.max_t; ++t) {
        counts[rng.uniform_index(prep.U)] += 1.0;
        const double expected = static_cast<double>(t) * share;
        double l1 = 0.0;
        for (double c : counts) l1 += std::abs(c - expected);
        if (l1 >= prep.scaled[t]) return true;
      }
      return false;
    }
    case BoundKind::VisitationLower: {
      double hits = 0.0, mass = 0.0;
      for (std::uint64_t t = 1; t <= prep.max_t; ++t) {
        if (rng.uniform() < prep.p) hits += 1.0;
        mass += prep.p;
        if (hits < mass / 2.0 - prep.W) return true;
      }
      return false;
    }
  }
  throw std::invalid_argument("unknown bound kind");
}

}  // namespace

double llnp(double x) {
  if (!(x > std::numbers::e)) return 0.0;
  return std::log(std::log(x));
}

double ubev_width(std::uint64_t n, std::size_t S, std::size_t A, std::size_t H, double delta) {
  check_delta(delta);
  return lil_width(n, 2.0 * llnp(static_cast<double>(n)), log_18sah(S, A, H, delta));
}

double logT_width(std::uint64_t n, std::uint64_t T, std::size_t S, std::size_t A, std::size_t H,
                  double delta) {
  check_delta(delta);
  const double log_T = std::log(std::max(static_cast<double>(T), std::numbers::e));
  return lil_width(n, 2.0 * log_T, log_18sah(S, A, H, delta));
}

double uniform_hoeffding_radius(std::uint64_t t, double sigma, double delta) {
  check_delta(delta);
  if (t == 0) throw std::invalid_argument("uniform_hoeffding_radius: t must be >= 1");
  const double td = static_cast<double>(t);
  return std::sqrt(4.0 * sigma * sigma / td * (2.0 * llnp(td) + std::log(3.0 / delta)));
}

double uniform_bernoulli_radius(std::uint64_t t, double mu, double delta) {
  check_delta(delta);
  if (t == 0) throw std::invalid_argument("uniform_bernoulli_radius: t must be >= 1");
  const double td = static_cast<double>(t);
  const double L = 2.0 * llnp(td) + std::log(3.0 / delta);
  return std::sqrt(2.0 * mu / td * L) + L / td;
}

double log_two_pow_minus_two(std::uint64_t U) {
  if (U < 2) throw std::invalid_argument("L1 bound needs U >= 2");
  if (U <= 60) return std::log(static_cast<double>((std::uint64_t{1} << U) - 2));
  // ln(2^U (1 - 2^{1-U})) = U ln 2 + log1p(-2^{1-U})
  return static_cast<double>(U) * std::numbers::ln2 + std::log1p(-std::ldexp(1.0, 1 - static_cast<int>(U)));
}

double uniform_l1_radius(std::uint64_t t, std::uint64_t U, double delta) {
  check_delta(delta);
  if (t == 0) throw std::invalid_argument("uniform_l1_radius: t must be >= 1");
  const double td = static_cast<double>(t);
  const double log_term = std::log(3.0 / delta) + log_two_pow_minus_two(U);
  return std::sqrt(4.0 / td * (2.0 * llnp(td) + log_term));
}

bool visitation_lower_bound_holds(std::span<const int> counts, std::span<const double> probs,
                                  double W) {
  if (counts.size() != probs.size())
    throw std::invalid_argument("visitation_lower_bound_holds: length mismatch");
  double hits = 0.0, mass = 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    hits += counts[i];
    mass += probs[i];
    if (hits < mass / 2.0 - W) return false;
  }
  return true;
}

std::string to_string(BoundKind kind) {
  switch (kind) {
    case BoundKind::UniformHoeffding: return "UniformHoeffding";
    case BoundKind::UniformBernoulli: return "UniformBernoulli";
    case BoundKind::UniformL1: return "UniformL1";
    case BoundKind::VisitationLower: return "VisitationLower";
    case BoundKind::FixedTimeHoeffding: return "FixedTimeHoeffding";
    case BoundKind::LogTWidth: return "LogTWidth";
  }
  return "?";
}

BoundKind bound_kind_from_string(const std::string& name) {
  for (auto k : {BoundKind::UniformHoeffding, BoundKind::UniformBernoulli, BoundKind::UniformL1,
                 BoundKind::VisitationLower, BoundKind::FixedTimeHoeffding, BoundKind::LogTWidth})
    if (to_string(k) == name) return k;
  throw std::invalid_argument("unknown bound kind '" + name + "'");
}

double BoundSpec::parameter(const std::string& name) const {
  if (auto it = parameters.find(name); it != parameters.end()) return it->second;
  if (name == "delta") return 0.1;
  if (name == "sigma" || name == "mu" || name == "p") return 0.5;
  if (name == "U") return 2.0;
  if (name == "W") return std::log(1.0 / parameter("delta"));
  if (name == "radius") return std::numeric_limits<double>::quiet_NaN();
  throw std::invalid_argument("unknown bound parameter '" + name + "'");
}

void validate(const BoundSpec& bound) {
  check_delta(bound.parameter("delta"));
  if (!(bound.parameter("sigma") >= 0.0)) throw std::invalid_argument("sigma must be >= 0");
  const double mu = bound.parameter("mu");
  if (!(mu >= 0.0 && mu <= 1.0)) throw std::invalid_argument("mu must lie in [0, 1]");
  const double p = bound.parameter("p");
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("p must lie in [0, 1]");
  if (!(bound.parameter("W") >= 0.0)) throw std::invalid_argument("W must be >= 0");
  const double U = bound.parameter("U");
  if (bound.kind == BoundKind::UniformL1 && (!(U >= 2.0) || U != std::floor(U)))
    throw std::invalid_argument("U must be an integer >= 2");
}

double failure_budget(const BoundSpec& bound) {
  const double delta = bound.parameter("delta");
  switch (bound.kind) {
    case BoundKind::UniformHoeffding:
    case BoundKind::UniformBernoulli:
    case BoundKind::LogTWidth:
      return 2.0 * delta;
    case BoundKind::UniformL1:
    case BoundKind::FixedTimeHoeffding:
      return delta;
    case BoundKind::VisitationLower:
      return std::exp(-bound.parameter("W"));
  }
  throw std::invalid_argument("unknown bound kind");
}

FailureRate monte_carlo_failure_rate(const BoundSpec& bound, std::uint64_t max_t,
                                     std::uint64_t trials, Rng& rng, unsigned workers) {
  validate(bound);
  if (trials < 100) throw std::invalid_argument("monte_carlo_failure_rate: need >= 100 trials");
  if (max_t == 0) throw std::invalid_argument("monte_carlo_failure_rate: max_t must be >= 1");
  const Prepared prep = prepare(bound, max_t);
  const std::uint64_t master = rng.next_u64();

  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::uint64_t>(workers, trials));
  std::atomic<std::uint64_t> violations{0};
  auto work = [&](unsigned worker) {
    std::uint64_t local = 0;
    for (std::uint64_t i = worker; i < trials; i += workers) {
      Rng trial_rng = Rng::stream(master, {i});
      if (trial_violates(prep, trial_rng)) ++local;
    }
    violations += local;
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w);
  }

  FailureRate out;
  out.trials = trials;
  out.violations = violations.load();
  out.rate = static_cast<double>(out.violations) / static_cast<double>(trials);
  out.standard_error = std::sqrt(out.rate * (1.0 - out.rate) / static_cast<double>(trials));
  return out;
}

}  // namespace upac
