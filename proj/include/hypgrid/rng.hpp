#pragma once

#include <cstdint>
#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include <gmpxx.h>

namespace hypgrid {

/**
 * Deterministic random helpers on top of mt19937_64.
 *
 * The standard distributions are implementation-defined, so sampling is done
 * with explicit algorithms to keep output byte-stable for a given seed.
 */
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform integer in [0, n), n >= 1 (rejection sampling, no modulo bias).
  std::uint64_t below(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("Rng::below: n must be positive");
    std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % n;
  }

  // Uniform double in [0, 1) with 53 random bits.
  double unit() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Uniform big integer in [0, n), n >= 1.
  mpz_class below_big(const mpz_class& n) {
    if (n <= 0) throw std::invalid_argument("Rng::below_big: n must be positive");
    std::size_t bits = mpz_sizeinbase(n.get_mpz_t(), 2);
    std::size_t words = (bits + 63) / 64;
    mpz_class x;
    while (true) {
      x = 0;
      for (std::size_t i = 0; i < words; ++i) {
        mpz_mul_2exp(x.get_mpz_t(), x.get_mpz_t(), 64);
        x += static_cast<unsigned long>(engine_());
      }
      mpz_fdiv_r_2exp(x.get_mpz_t(), x.get_mpz_t(), bits);
      if (x < n) return x;
    }
  }

  // Geometric variate with support {1, 2, ...}: number of Bernoulli(p) trials
  // up to and including the first success. Requires p in (0, 1].
  std::uint64_t geometric(double p) {
    if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("Rng::geometric: p out of range");
    if (p == 1.0) return 1;
    double u;
    do {
      u = unit();
    } while (u == 0.0);
    double g = std::floor(std::log(u) / std::log1p(-p));
    if (g < 0.0) g = 0.0;
    return 1 + static_cast<std::uint64_t>(g);
  }

  // Index sampled from an unnormalized weight vector.
  std::size_t discrete(const std::vector<double>& weights) {
    double total = 0.0;
    for (double w : weights) total += w;
    if (!(total > 0.0)) throw std::invalid_argument("Rng::discrete: weights must sum to > 0");
    double target = unit() * total;
    double acc = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      acc += weights[i];
      if (target < acc) return i;
    }
    return weights.size() - 1;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace hypgrid
