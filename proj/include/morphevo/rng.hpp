#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace morphevo {

// SplitMix64 finalizer. All randomness in the toolkit flows from a base seed
// through derive_seed(); there is no ambient entropy anywhere.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Named sub-streams of a seed. Keeping these in one enum documents the whole
// seed-derivation scheme: stream(base, purpose, a, b) chains splitmix64 over
// the purpose tag and up to two indices (run, branch, generation, cell, ...).
enum class SeedStream : std::uint64_t {
  kRun = 1,          // base_seed -> per-run root seed (index = run number)
  kXnesInitMean,     // per-branch initial distribution mean
  kXnesAsk,          // per-generation candidate sampling
  kScheduleDraw,     // per-call schedule randomness
  kCandidateEval,    // per-generation episode seed shared by all candidates
  kCrossEval,        // root for the fixed per-(run, morphology) episode seeds
  kEpisode,          // (root, cell, k) -> episode seed, shared by sweeps
  kDefaultEval,      // default-morphology metric episodes
  kMetrics,          // root for a run's post-hoc metric sweeps
};

inline std::uint64_t derive_seed(std::uint64_t base, SeedStream stream,
                                 std::uint64_t a = 0, std::uint64_t b = 0) {
  std::uint64_t h = splitmix64(base);
  h = splitmix64(h ^ static_cast<std::uint64_t>(stream));
  h = splitmix64(h ^ a);
  h = splitmix64(h ^ b);
  return h;
}

// Seed of one evaluation episode: root stream, morphology cell, repeat index.
// Used identically by the evolutionary cross-evaluations and by metric
// sweeps, so a sweep can reproduce the fitness values seen during evolution.
inline std::uint64_t episode_seed(std::uint64_t root, std::uint64_t cell,
                                  std::uint64_t k = 0) {
  return derive_seed(root, SeedStream::kEpisode, cell, k);
}

// Deterministic RNG. mt19937_64 gives a fully specified bit stream; the
// uniform and normal mappings below avoid std::*_distribution, whose output
// is implementation-defined, so identical seeds give identical doubles on
// every standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform in [0, 1), 53-bit resolution.
  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Uniform integer in [0, n).
  std::uint64_t uniform_int(std::uint64_t n) {
    return static_cast<std::uint64_t>(uniform01() * static_cast<double>(n)) % n;
  }

  // Standard normal via Box-Muller; the spare value is cached.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform01();
    while (u1 <= 0.0) u1 = uniform01();
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * M_PI * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace morphevo
