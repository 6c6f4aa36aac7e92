#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>
#include <string_view>

namespace sccdag {

/// SplitMix64 finalizer (Steele, Lea & Flood 2014).
std::uint64_t mix64(std::uint64_t x);

/// Stable 64-bit FNV-1a hash, used to turn purpose tags into stream ids.
std::uint64_t hash_tag(std::string_view tag);

/// Derives a sub-seed by folding each part through mix64:
///   h = 0x9E3779B97F4A7C15; for p in parts: h = mix64(h ^ mix64(p)).
/// The derivation is platform independent.
std::uint64_t derive_seed(std::initializer_list<std::uint64_t> parts);

/// Reproducible random stream. The engine is std::mt19937_64, whose output
/// sequence is fixed by the standard; every distribution below is
/// implemented here rather than through <random> distributions, whose
/// algorithms differ between standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(mix64(seed)) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n) by rejection (no modulo bias).
  std::uint64_t below(std::uint64_t n);

  bool bernoulli(double p) { return uniform() < p; }

  /// Zero-mean Laplace with the given standard deviation (inverse CDF).
  double laplace(double stddev);

  /// Exponential shifted to zero mean, with the given standard deviation.
  double centered_exponential(double stddev);

  /// Standard normal via Box-Muller (no cached second value).
  double normal();

  /// Fisher-Yates shuffle.
  template <typename T>
  void shuffle(std::span<T> values) {
    for (std::size_t i = values.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(below(i));
      std::swap(values[i - 1], values[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace sccdag
