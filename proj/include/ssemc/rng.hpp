#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace ssemc {

/// Deterministic random source. std::mt19937_64 is pinned by the standard,
/// but the standard distributions are not, so the draw helpers here do their
/// own (portable) mapping from raw 64-bit outputs.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform integer in [0, n), rejection-sampled to avoid modulo bias.
  std::uint64_t below(std::uint64_t n) {
    if (n == 0) return 0;
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x = engine_();
    while (x >= limit) x = engine_();
    return x % n;
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double real01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * real01(); }

  /// Box-Muller; one variate per call keeps replay order obvious.
  double normal(double mean, double stddev) {
    double u1 = real01();
    while (u1 == 0.0) u1 = real01();
    const double u2 = real01();
    const double z = std::sqrt(-2.0 * std::log(u1)) *
                     std::cos(2.0 * 3.14159265358979323846 * u2);
    return mean + stddev * z;
  }

  /// Weighted pick: index i with probability weights[i] / sum(weights).
  std::size_t pick(const std::vector<double>& weights) {
    double total = 0.0;
    for (double w : weights) total += w;
    double x = real01() * total;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      x -= weights[i];
      if (x < 0.0) return i;
    }
    return weights.empty() ? 0 : weights.size() - 1;
  }

  /// Fisher-Yates with the portable bounded draw above.
  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace ssemc
