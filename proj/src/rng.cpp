#include "compreg/rng.hpp"

#include <cmath>
#include <stdexcept>

#include "compreg/errors.hpp"

namespace compreg {

std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

Rng Rng::substream(std::uint64_t seed, std::uint64_t k) {
  return Rng(mix64(seed) ^ mix64(0xA5A5A5A5A5A5A5A5ull + k));
}

double Rng::uniform() {
  return std::uniform_real_distribution<double>(0.0, 1.0)(engine_);
}

double Rng::uniform(double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(engine_);
}

double Rng::normal(double mean, double sd) {
  return std::normal_distribution<double>(mean, sd)(engine_);
}

double Rng::gamma(double shape) {
  return std::gamma_distribution<double>(shape, 1.0)(engine_);
}

std::int64_t Rng::uniform_int(std::int64_t lo, std::int64_t hi) {
  return std::uniform_int_distribution<std::int64_t>(lo, hi)(engine_);
}

Composition Rng::dirichlet(const std::vector<double>& alpha) {
  if (alpha.size() < 2)
    throw InvalidArgument("dirichlet: need at least two concentration parameters");
  std::vector<double> g(alpha.size());
  for (std::size_t k = 0; k < alpha.size(); ++k) {
    if (!(alpha[k] > 0.0))
      throw InvalidArgument("dirichlet: concentration parameters must be positive");
    // Draw until nonzero: tiny shapes can underflow to exactly 0.
    do {
      g[k] = gamma(alpha[k]);
    } while (g[k] == 0.0);
  }
  return closure(g);
}

std::vector<std::int64_t> Rng::multinomial(std::int64_t trials,
                                           const std::vector<double>& probs) {
  if (trials < 0) throw InvalidArgument("multinomial: negative trial count");
  const std::size_t kcat = probs.size();
  if (kcat < 2) throw InvalidArgument("multinomial: need at least two categories");
  std::vector<std::int64_t> counts(kcat, 0);
  double rest = 0.0;
  for (double p : probs) {
    if (p < 0.0) throw InvalidArgument("multinomial: negative probability");
    rest += p;
  }
  std::int64_t remaining = trials;
  for (std::size_t k = 0; k + 1 < kcat && remaining > 0; ++k) {
    if (probs[k] >= rest) {
      counts[k] = remaining;
      remaining = 0;
      break;
    }
    const double cond = probs[k] / rest;
    std::binomial_distribution<std::int64_t> bin(remaining, cond);
    counts[k] = bin(engine_);
    remaining -= counts[k];
    rest -= probs[k];
  }
  counts[kcat - 1] += remaining;
  return counts;
}

std::vector<std::size_t> Rng::permutation(std::size_t n) {
  std::vector<std::size_t> p(n);
  for (std::size_t i = 0; i < n; ++i) p[i] = i;
  for (std::size_t i = n; i > 1; --i) {
    const auto j = static_cast<std::size_t>(uniform_int(0, static_cast<std::int64_t>(i) - 1));
    std::swap(p[i - 1], p[j]);
  }
  return p;
}

}  // namespace compreg
