#pragma once

// Time-uniform confidence radii and a Monte-Carlo verifier for them.
//
// All radii are closed-form and pure. Sample sizes are 1-based counts.

#include <cstdint>
#include <map>
#include <span>
#include <string>

#include "upac/rng.hpp"

namespace upac {

/// ln(ln(max{x, e})). Zero for x <= e.
double llnp(double x);

/// Width used by the optimistic planner:
///   sqrt((2 llnp(n) + ln(18 S A H / delta)) / n),  +inf for n = 0.
double ubev_width(std::uint64_t n, std::size_t S, std::size_t A, std::size_t H, double delta);

/// Same constants as ubev_width with llnp(n) replaced by ln(max{T, e}):
///   sqrt((2 ln max{T, e} + ln(18 S A H / delta)) / n),  +inf for n = 0.
double logT_width(std::uint64_t n, std::uint64_t T, std::size_t S, std::size_t A, std::size_t H,
                  double delta);

/// sqrt(4 sigma^2 / t * (2 llnp(t) + ln(3/delta))). Two-sided, all t, failure <= 2 delta
/// for conditionally sigma^2-subgaussian increments.
double uniform_hoeffding_radius(std::uint64_t t, double sigma, double delta);

/// sqrt(2 mu / t * L) + L / t with L = 2 llnp(t) + ln(3/delta). Two-sided failure
/// <= 2 delta for Bernoulli(mu) samples.
double uniform_bernoulli_radius(std::uint64_t t, double mu, double delta);

/// sqrt(4 / t * (2 llnp(t) + ln(3 (2^U - 2) / delta))) on the L1 deviation of an
/// empirical distribution over U >= 2 outcomes; failure <= delta.
double uniform_l1_radius(std::uint64_t t, std::uint64_t U, double delta);

/// ln(2^U - 2). Exact integer arithmetic up to U = 60, log-space beyond.
double log_two_pow_minus_two(std::uint64_t U);

/// True iff sum_{t<=n} X_t >= sum_{t<=n} P_t / 2 - W for every prefix n.
/// Throws std::invalid_argument on a length mismatch.
bool visitation_lower_bound_holds(std::span<const int> counts, std::span<const double> probs,
                                  double W);

enum class BoundKind {
  UniformHoeffding,
  UniformBernoulli,
  UniformL1,
  VisitationLower,
  FixedTimeHoeffding,
  LogTWidth,
};

std::string to_string(BoundKind kind);
/// Throws std::invalid_argument for an unknown name.
BoundKind bound_kind_from_string(const std::string& name);

/// A bound to verify together with its parameters. Recognized names:
///   delta (all), sigma, mu (Hoeffding-type and Bernoulli), U (L1),
///   p and W (VisitationLower), radius (FixedTimeHoeffding constant override).
/// Missing names take the defaults documented in parameter().
struct BoundSpec {
  BoundKind kind = BoundKind::UniformHoeffding;
  std::map<std::string, double> parameters;

  double parameter(const std::string& name) const;
};

/// Throws std::invalid_argument if a parameter is out of its domain.
void validate(const BoundSpec& bound);

/// Failure probability the bound promises (2 delta, delta, e^-W, ...).
double failure_budget(const BoundSpec& bound);

struct FailureRate {
  double rate = 0.0;
  double standard_error = 0.0;
  std::uint64_t violations = 0;
  std::uint64_t trials = 0;
};

/// Simulates `trials` independent sample paths of length max_t from the
/// bound's nominal data distribution and counts paths on which the bound is
/// violated at any t <= max_t. Trials are split across `workers` threads
/// (0 = hardware concurrency); each trial owns its own stream so the result
/// does not depend on the worker count.
FailureRate monte_carlo_failure_rate(const BoundSpec& bound, std::uint64_t max_t,
                                     std::uint64_t trials, Rng& rng, unsigned workers = 0);

}  // namespace upac
