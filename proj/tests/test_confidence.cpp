#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

#include "upac/baselines.hpp"
#include "upac/confidence.hpp"

using namespace upac;

namespace {

// Expected values below were computed with mpmath at 30 digits.
constexpr double kLn27000 = 10.2035921449864661262397100748;

BoundSpec spec_of(BoundKind kind, std::map<std::string, double> params) {
  return BoundSpec{kind, std::move(params)};
}

}  // namespace

TEST_CASE("llnp values") {
  CHECK(llnp(1.0) == 0.0);
  CHECK(llnp(-5.0) == 0.0);
  CHECK(llnp(std::numbers::e) == 0.0);
  CHECK(llnp(std::exp(std::numbers::e)) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(llnp(100.0) == doctest::Approx(1.52717962580790110922).epsilon(1e-14));
}

TEST_CASE("llnp properties on grids") {
  std::vector<double> grid;
  for (int i = 0; i < 10'000; ++i) grid.push_back(std::pow(10.0, -2.0 + 10.0 * i / 9'999.0));
  for (std::size_t i = 1; i < grid.size(); ++i) CHECK(llnp(grid[i]) >= llnp(grid[i - 1]));

  // (llnp(n x) + D) / x is nonincreasing for D >= 1.
  for (double n : {0.0, 1.0, 7.0, 1e3}) {
    for (double D : {1.0, 2.5, 10.0}) {
      double prev = std::numeric_limits<double>::infinity();
      for (double x : grid) {
        const double f = (llnp(n * x) + D) / x;
        CHECK(f <= prev);
        prev = f;
      }
    }
  }

  std::mt19937_64 gen(41);
  std::uniform_real_distribution<double> log_unif(-3.0, 12.0);
  for (int i = 0; i < 10'000; ++i) {
    const double x = std::pow(10.0, log_unif(gen)), y = std::pow(10.0, log_unif(gen));
    CHECK(llnp(x * y) <= llnp(x) + llnp(y) + 1.0 + 1e-12);
  }
}

TEST_CASE("ubev width") {
  CHECK(ubev_width(0, 5, 3, 10, 0.1) == std::numeric_limits<double>::infinity());
  CHECK(ubev_width(1, 5, 3, 10, 0.1) == doctest::Approx(3.19430620714208707907).epsilon(1e-13));
  CHECK(ubev_width(100, 5, 3, 10, 0.1) == doctest::Approx(0.36411469891508456301).epsilon(1e-13));
  // Independent re-derivation of the closed form.
  for (std::uint64_t n : {2ULL, 3ULL, 17ULL, 1000ULL, 123456ULL}) {
    const double nd = static_cast<double>(n);
    const double ll = nd > std::numbers::e ? std::log(std::log(nd)) : 0.0;
    const double expected = std::sqrt((2.0 * ll + std::log(27000.0)) / nd);
    CHECK(ubev_width(n, 5, 3, 10, 0.1) == doctest::Approx(expected).epsilon(1e-14));
  }
  CHECK_THROWS(ubev_width(1, 5, 3, 10, 0.0));
  CHECK_THROWS(ubev_width(1, 5, 3, 10, 1.5));
}

TEST_CASE("logT width and rate comparison") {
  CHECK(logT_width(0, 10, 5, 3, 10, 0.1) == std::numeric_limits<double>::infinity());
  CHECK(logT_width(1, 2, 5, 3, 10, 0.1) == doctest::Approx(3.49336401552807922179).epsilon(1e-13));
  CHECK(logT_width(1, 1, 5, 3, 10, 0.1) == doctest::Approx(std::sqrt(2.0 + kLn27000)).epsilon(1e-14));
  for (std::uint64_t n : {1ULL, 5ULL, 100ULL}) {
    double prev = 0.0;
    for (std::uint64_t T = 1; T < 1'000'000; T = T * 3 + 1) {
      const double w = logT_width(n, T, 5, 3, 10, 0.1);
      CHECK(w >= prev);
      prev = w;
    }
  }
  // Ordering logT >= logn >= ubev for T >= n >= 3, strict between ubev and logT.
  for (std::uint64_t n = 3; n <= 1'000'000; n = n * 2 + 1)
    for (std::uint64_t T : {n, 2 * n, 100 * n}) {
      const double u = ubev_width(n, 5, 3, 10, 0.1);
      const double ln = logn_width(n, 5, 3, 10, 0.1);
      const double lt = logT_width(n, T, 5, 3, 10, 0.1);
      CHECK(u < lt);
      CHECK(ln >= u);
      CHECK(lt >= ln);
    }
}

TEST_CASE("uniform Hoeffding radius") {
  CHECK(uniform_hoeffding_radius(1, 0.0, 0.1) == 0.0);
  CHECK(uniform_hoeffding_radius(1000, 0.0, 0.1) == 0.0);
  CHECK(uniform_hoeffding_radius(1, 0.5, 0.3) ==
        doctest::Approx(1.51742712938514635086).epsilon(1e-14));
  double prev = uniform_hoeffding_radius(3, 0.5, 0.1);
  for (std::uint64_t t = 4; t <= 1'000'000; ++t) {
    const double r = uniform_hoeffding_radius(t, 0.5, 0.1);
    if (r > prev) FAIL("radius increased at t=" << t);
    prev = r;
  }
}

TEST_CASE("uniform Bernoulli radius") {
  CHECK(uniform_bernoulli_radius(1, 0.0, 3.0 * std::exp(-2.0)) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(uniform_bernoulli_radius(1, 0.5, 0.3) ==
        doctest::Approx(3.82001222237919203488).epsilon(1e-14));
  for (std::uint64_t t = 1000; t <= 1'000'000; t *= 10)
    CHECK(uniform_bernoulli_radius(t, 0.01, 0.1) < uniform_hoeffding_radius(t, 0.5, 0.1));
}

TEST_CASE("uniform L1 radius") {
  CHECK(uniform_l1_radius(1, 2, 1.0) == doctest::Approx(2.67713239809170065694).epsilon(1e-14));
  CHECK(uniform_l1_radius(1, 2, 1.0) > 2.0);
  CHECK(uniform_l1_radius(10'000, 10, 0.1) ==
        doctest::Approx(0.0768670742650232472247).epsilon(1e-13));

  // Two evaluation paths for ln(2^U - 2): exact integer and log-space.
  for (std::uint64_t U = 2; U <= 60; ++U) {
    const double log_space = static_cast<double>(U) * std::numbers::ln2 +
                             std::log1p(-std::ldexp(1.0, 1 - static_cast<int>(U)));
    CHECK(log_two_pow_minus_two(U) == doctest::Approx(log_space).epsilon(1e-14));
  }
  CHECK(std::isfinite(uniform_l1_radius(10, 200, 0.1)));
  CHECK(log_two_pow_minus_two(200) == doctest::Approx(200.0 * std::numbers::ln2).epsilon(1e-15));
  CHECK_THROWS(uniform_l1_radius(1, 1, 0.1));
}

TEST_CASE("visitation lower bound predicate") {
  const std::vector<int> ones{1, 1, 1};
  const std::vector<double> probs{0.9, 0.2, 0.5};
  CHECK(visitation_lower_bound_holds(ones, probs, 0.0));
  CHECK_FALSE(visitation_lower_bound_holds(std::vector<int>{0, 0}, std::vector<double>{1.0, 1.0}, 0.0));
  CHECK(visitation_lower_bound_holds(std::vector<int>{0, 0}, std::vector<double>{1.0, 1.0}, 1.0));
  CHECK_THROWS_AS(visitation_lower_bound_holds(ones, std::vector<double>{0.5}, 0.0),
                  std::invalid_argument);

  // Violation frequency over i.i.d. Bernoulli(1/2) paths stays below e^-W.
  std::mt19937_64 gen(43);
  std::bernoulli_distribution coin(0.5);
  const double W = std::log(100.0);
  constexpr int kTrials = 100'000;
  int violations = 0;
  std::vector<int> xs(1000);
  const std::vector<double> ps(1000, 0.5);
  for (int i = 0; i < kTrials; ++i) {
    for (auto& x : xs) x = coin(gen);
    violations += !visitation_lower_bound_holds(xs, ps, W);
  }
  const double rate = static_cast<double>(violations) / kTrials;
  CHECK(rate <= 0.01 + 3.0 * std::sqrt(0.01 * 0.99 / kTrials));
}

TEST_CASE("Monte-Carlo verifier edge cases") {
  Rng rng(1);
  const auto vacuous = monte_carlo_failure_rate(
      spec_of(BoundKind::FixedTimeHoeffding, {{"radius", 10.0}}), 1000, 200, rng);
  CHECK(vacuous.rate == 0.0);
  CHECK(vacuous.standard_error == 0.0);

  const auto zero = monte_carlo_failure_rate(
      spec_of(BoundKind::FixedTimeHoeffding, {{"radius", 0.0}}), 1000, 200, rng);
  CHECK(zero.rate == 1.0);

  CHECK_THROWS(monte_carlo_failure_rate(spec_of(BoundKind::UniformL1, {{"U", 1.0}}), 10, 200, rng));
  CHECK_THROWS(monte_carlo_failure_rate(spec_of(BoundKind::UniformHoeffding, {}), 10, 99, rng));
  CHECK_THROWS(bound_kind_from_string("NoSuchBound"));
  CHECK(bound_kind_from_string("UniformL1") == BoundKind::UniformL1);
}

TEST_CASE("Monte-Carlo verifier is independent of the worker count") {
  const auto bound = spec_of(BoundKind::FixedTimeHoeffding, {{"delta", 0.1}});
  Rng a(77), b(77);
  const auto serial = monte_carlo_failure_rate(bound, 2000, 1000, a, 1);
  const auto parallel = monte_carlo_failure_rate(bound, 2000, 1000, b, 8);
  CHECK(serial.violations == parallel.violations);
  // A fixed-time bound checked at every t fails far more often than delta.
  CHECK(serial.rate > 0.1);
}

TEST_CASE("uniform bounds hold at reduced scale") {
  Rng rng(2);
  for (const auto& bound :
       {spec_of(BoundKind::UniformHoeffding, {{"delta", 0.1}, {"sigma", 0.5}, {"mu", 0.5}}),
        spec_of(BoundKind::UniformBernoulli, {{"delta", 0.1}, {"mu", 0.1}}),
        spec_of(BoundKind::UniformL1, {{"delta", 0.1}, {"U", 3.0}}),
        spec_of(BoundKind::VisitationLower, {{"p", 0.3}, {"W", std::log(10.0)}}),
        spec_of(BoundKind::LogTWidth, {{"delta", 0.1}})}) {
    const auto r = monte_carlo_failure_rate(bound, 2000, 2000, rng);
    CHECK_MESSAGE(r.rate <= failure_budget(bound) + 3.0 * r.standard_error, to_string(bound.kind));
  }
}
