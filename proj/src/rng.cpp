#include "sccdag/rng.hpp"

#include <cmath>
#include <numbers>

#include "sccdag/errors.hpp"

namespace sccdag {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t hash_tag(std::string_view tag) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : tag) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

std::uint64_t derive_seed(std::initializer_list<std::uint64_t> parts) {
  std::uint64_t h = 0x9E3779B97F4A7C15ULL;
  for (std::uint64_t p : parts) h = mix64(h ^ mix64(p));
  return h;
}

std::uint64_t Rng::below(std::uint64_t n) {
  if (n == 0) throw Error("Rng::below: empty range");
  if (n == 1) return 0;
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return x % n;
}

double Rng::laplace(double stddev) {
  const double b = stddev / std::numbers::sqrt2;
  double u;
  do {
    u = uniform() - 0.5;
  } while (u == -0.5);
  return u < 0 ? b * std::log1p(2.0 * u) : -b * std::log1p(-2.0 * u);
}

double Rng::centered_exponential(double stddev) {
  // -log(1 - U) with U in [0, 1) is Exp(1), mean 1 and stddev 1.
  return stddev * (-std::log1p(-uniform()) - 1.0);
}

double Rng::normal() {
  double u1;
  do {
    u1 = uniform();
  } while (u1 == 0.0);
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace sccdag
