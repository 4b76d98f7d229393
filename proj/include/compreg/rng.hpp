#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "compreg/composition.hpp"

namespace compreg {

// splitmix64 finalizer; used to spread user seeds and derive substreams.
std::uint64_t mix64(std::uint64_t z);

// Deterministic random source. Replicate-level work must draw from
// substream(seed, index) so results do not depend on thread count or
// scheduling order.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(mix64(seed)) {}

  // Independent stream k of a root seed (stable across runs and threads).
  static Rng substream(std::uint64_t seed, std::uint64_t k);

  double uniform();                        // U(0,1)
  double uniform(double lo, double hi);    // U(lo,hi)
  double normal(double mean, double sd);
  double gamma(double shape);              // Gamma(shape, 1)
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);  // inclusive

  // Dirichlet(alpha) via normalized Gamma draws; closure pins the sum.
  Composition dirichlet(const std::vector<double>& alpha);

  // Multinomial(trials, probs) via sequential conditional binomials.
  std::vector<std::int64_t> multinomial(std::int64_t trials,
                                        const std::vector<double>& probs);

  // Uniform random permutation of {0,...,n-1} (Fisher-Yates).
  std::vector<std::size_t> permutation(std::size_t n);

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace compreg
