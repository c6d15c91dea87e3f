#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

namespace cvboost {

// All randomness in the project flows through this header. Streams are
// derived from a user seed plus a domain tag and context words, so any unit
// of work (one fold draw, one permutation, one repetition) can be replayed
// in isolation and results do not depend on execution order.
//
// Distributions are implemented explicitly on top of std::mt19937_64 (whose
// output sequence is pinned by the standard) instead of <random>'s
// distribution templates, which are implementation-defined and would break
// the byte-stable output contract.

enum class SeedDomain : std::uint64_t {
  NodeFolds = 1,   // per-node fold assignment inside tree growth
  KFold = 2,       // dataset-level K-fold partition
  Permutation = 3, // PFI column shuffles
  Repetition = 4,  // simulation repetitions
  FitSeed = 5,     // per-(rep, method) boosting seeds in the harness
};

inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Folds an arbitrary tuple of words into one 64-bit seed.
inline std::uint64_t mix_seed(std::initializer_list<std::uint64_t> words) {
  std::uint64_t state = 0x8f3c9d1b2e5a7740ULL;
  std::uint64_t acc = splitmix64(state);
  for (std::uint64_t w : words) {
    state ^= w;
    acc ^= splitmix64(state);
    acc *= 0xff51afd7ed558ccdULL;
    acc ^= acc >> 33;
  }
  return acc;
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform integer in [0, bound); rejection sampling, no modulo bias.
  std::uint64_t below(std::uint64_t bound) {
    if (bound <= 1) return 0;
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t x = engine_();
    while (x >= limit) x = engine_();
    return x % bound;
  }

  // Uniform double in [0, 1) with 53 random bits.
  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  bool bernoulli(double p) { return uniform01() < p; }

  // Standard normal via Box-Muller. One fresh pair of uniforms per draw.
  double normal() {
    double u1 = uniform01();
    while (u1 <= 0.0) u1 = uniform01();
    const double u2 = uniform01();
    constexpr double two_pi = 6.283185307179586476925286766559;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
  }

  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace cvboost
