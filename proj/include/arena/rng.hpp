#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <random>

namespace arena {

/// Seeded random stream used by every stochastic agent.
///
/// The engine itself is deterministic; agents draw from an Rng whose seed is
/// derived from the match seed. Bounded draws are computed here rather than
/// through <random> distributions, whose output is implementation-defined, so
/// that replays reproduce across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform integer in [0, n). n must be > 0.
  std::size_t below(std::size_t n) {
    const unsigned __int128 wide =
        static_cast<unsigned __int128>(engine_()) * static_cast<unsigned __int128>(n);
    return static_cast<std::size_t>(wide >> 64);
  }

  /// Uniform double in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return uniform() < p; }

 private:
  std::mt19937_64 engine_;
};

/// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Folds a list of values into one seed (e.g. master seed, pair, game index).
constexpr std::uint64_t derive_seed(std::initializer_list<std::uint64_t> parts) {
  std::uint64_t h = 0x6a09e667f3bcc908ULL;
  for (std::uint64_t p : parts) h = mix64(h ^ mix64(p));
  return h;
}

}  // namespace arena
