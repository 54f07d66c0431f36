#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace causalflow {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// mt19937_64 engine with explicitly coded transforms; std::*_distribution is
// avoided because its output is implementation-defined and would break the
// byte-identical reproducibility contract of the pipeline.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  // Independent substream for (seed, stream); used for per-trial, per-roi and
  // per-resample streams so results do not depend on evaluation order.
  static Rng derive(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t s = seed;
    std::uint64_t a = splitmix64(s);
    s ^= 0x6A09E667F3BCC909ull + stream * 0x9E3779B97F4A7C15ull;
    std::uint64_t b = splitmix64(s);
    return Rng(a ^ (b + 0x2545F4914F6CDD1Dull * (stream + 1)));
  }

  std::uint64_t next() { return gen_(); }

  // [0, 1) with 53 random bits
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  // Box-Muller; two draws per variate, no cached state.
  double normal() {
    double u1 = 1.0 - uniform();  // (0, 1]
    double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
  }

  // Logistic(0, scale) by inversion.
  double logistic(double scale) {
    double u = uniform();
    u = std::clamp(u, 0x1.0p-53, 1.0 - 0x1.0p-53);
    return scale * std::log(u / (1.0 - u));
  }

  // Unbiased integer in [0, n), n > 0.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = ~std::uint64_t{0} - ~std::uint64_t{0} % n;
    std::uint64_t x;
    do {
      x = next();
    } while (x >= limit);
    return x % n;
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[static_cast<std::size_t>(below(i))]);
    }
  }

 private:
  static constexpr double kTwoPi = 6.283185307179586476925287;
  std::mt19937_64 gen_;
};

}  // namespace causalflow
