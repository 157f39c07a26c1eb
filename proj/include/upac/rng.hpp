#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>
#include <string_view>

namespace upac {

/// Identifier written into run metadata so results can be tied to the
/// generator that produced them.
inline constexpr std::string_view kRngIdentifier = "mt19937_64+splitmix64-seed";

/// SplitMix64 finalizer. Used to derive independent stream seeds.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// FNV-1a over bytes; stable string hash for stream derivation and digests.
std::uint64_t fnv1a64(std::string_view bytes) noexcept;

/// Seeded 64-bit generator. One instance is owned by exactly one worker.
///
/// Independent streams are derived from a master seed plus any number of
/// integer keys (run index, purpose tag, ...), so concurrent consumers never
/// share state and results do not depend on scheduling.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  /// Stream for (master, keys...). Distinct key tuples give unrelated streams.
  static Rng stream(std::uint64_t master, std::initializer_list<std::uint64_t> keys);

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform double in [0, 1), 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return uniform() < p; }

  /// Uniform integer in [0, n). Requires n > 0.
  std::size_t uniform_index(std::size_t n);

  /// Draw an index from a probability vector by inversion. The last index
  /// with positive mass absorbs round-off.
  std::size_t categorical(std::span<const double> probs);

  double standard_normal();

  /// Gamma(shape, 1). Marsaglia-Tsang for shape >= 1; for shape < 1 draws
  /// Gamma(shape + 1) and multiplies by U^(1/shape).
  double gamma(double shape);

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace upac
