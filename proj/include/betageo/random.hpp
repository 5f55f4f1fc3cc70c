#pragma once

// Seeded sampling helpers. std::mt19937_64 is bit-exact by the standard; the
// distributions here are hand-rolled so seeded outputs stay byte-identical
// across standard libraries.

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

namespace betageo::rng {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Independent generator for (seed, stream); streams derived via splitmix.
inline std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t s = seed ^ (0x6a09e667f3bcc909ULL + stream * 0x9e3779b97f4a7c15ULL);
  const std::uint64_t a = splitmix64(s);
  const std::uint64_t b = splitmix64(s);
  std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                    static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
  return std::mt19937_64(seq);
}

/// Uniform in [0, 1) with 53 random bits.
inline double uniform01(std::mt19937_64& gen) {
  return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

/// Uniform in [lo, hi).
inline double uniform(std::mt19937_64& gen, double lo, double hi) {
  return lo + (hi - lo) * uniform01(gen);
}

/// Unbiased uniform integer in [0, n).
inline std::size_t uniform_below(std::mt19937_64& gen, std::size_t n) {
  if (n == 0) throw std::invalid_argument("uniform_below: n must be positive");
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
  std::uint64_t r = gen();
  while (r >= limit) r = gen();
  return static_cast<std::size_t>(r % n);
}

/// Standard normal via Box-Muller (one value per call).
inline double normal(std::mt19937_64& gen) {
  const double u1 = 1.0 - uniform01(gen);  // (0, 1]
  const double u2 = uniform01(gen);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
}

/// Gamma(shape, 1) via Marsaglia-Tsang; boosted for shape < 1.
inline double sample_gamma(std::mt19937_64& gen, double shape) {
  if (!(shape > 0.0)) throw std::invalid_argument("sample_gamma: shape must be > 0");
  if (shape < 1.0) {
    const double u = uniform01(gen);
    return sample_gamma(gen, shape + 1.0) * std::pow(u, 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x = normal(gen);
    const double t = 1.0 + c * x;
    if (t <= 0.0) continue;
    const double v = t * t * t;
    const double u = uniform01(gen);
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
  }
}

/// Beta(a, b) from two gamma draws.
inline double sample_beta(std::mt19937_64& gen, double a, double b) {
  const double g1 = sample_gamma(gen, a);
  const double g2 = sample_gamma(gen, b);
  return g1 / (g1 + g2);
}

/// Fisher-Yates shuffle.
template <typename T>
void shuffle(std::mt19937_64& gen, std::vector<T>& values) {
  for (std::size_t i = values.size(); i > 1; --i) {
    std::swap(values[i - 1], values[uniform_below(gen, i)]);
  }
}

}  // namespace betageo::rng
