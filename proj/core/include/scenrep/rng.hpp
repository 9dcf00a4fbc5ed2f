#ifndef SCENREP_RNG_HPP
#define SCENREP_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace scenrep {

// All randomness flows from one master seed through named substreams, so
// that independent pieces of an experiment (partitions, sampling, bootstrap)
// stay reproducible when run in any order or in parallel.
//
// Distribution sampling is implemented here instead of <random>'s
// distributions: the standard does not pin their algorithms, and byte-stable
// outputs across toolchains are part of the CLI contract.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Derived generator for a named substream of `seed`.
  static Rng substream(std::uint64_t seed, std::string_view name) {
    std::uint64_t h = 0xcbf29ce484222325ull;  // FNV-1a over the name
    for (char c : name) {
      h ^= static_cast<unsigned char>(c);
      h *= 0x100000001b3ull;
    }
    return Rng(mix(seed ^ mix(h)));
  }

  static Rng substream(std::uint64_t seed, std::string_view name, std::uint64_t index) {
    Rng base = substream(seed, name);
    return Rng(mix(base.engine_() ^ mix(index + 0x9e3779b97f4a7c15ull)));
  }

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Uniform on (0, 1].
  double uniform_open0() { return static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53; }

  // Uniform integer in {0, ..., n-1}; the floor(u*n) construction.
  std::size_t uniform_index(std::size_t n) {
    auto k = static_cast<std::size_t>(uniform() * static_cast<double>(n));
    return k < n ? k : n - 1;
  }

  // Standard normal via Box-Muller; consumes exactly two uniforms per draw.
  double normal() {
    double u1 = uniform_open0();
    double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  double lognormal(double log_median, double sigma) {
    return std::exp(log_median + sigma * normal());
  }

 private:
  static std::uint64_t mix(std::uint64_t x) {  // splitmix64 finalizer
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
  }

  std::mt19937_64 engine_;
};

}  // namespace scenrep

#endif  // SCENREP_RNG_HPP
