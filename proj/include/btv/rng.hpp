#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace btv {

/// SplitMix64 finalizer. Used only to derive independent stream seeds.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed of the stream addressed by `path` under `master`, e.g.
/// derive_seed(seed, {trial}) or derive_seed(seed, {cell, piece}).
/// Stable across platforms and worker counts.
constexpr std::uint64_t derive_seed(std::uint64_t master,
                                    std::initializer_list<std::uint64_t> path) noexcept {
  std::uint64_t h = mix64(master);
  for (std::uint64_t step : path) h = mix64(h ^ mix64(step + 0x632be59bd9b4e019ULL));
  return h;
}

/// mt19937_64 with portable conversions. std distributions are avoided because
/// their output is implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, bound). bound must be > 0.
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % bound;
  }

  bool bernoulli(double p) { return p >= 1.0 || (p > 0.0 && uniform() < p); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace btv
