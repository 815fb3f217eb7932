#pragma once

#include <cstdint>
#include <random>

namespace forest_spectra {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Deterministic random stream. Wraps std::mt19937_64 (whose output sequence
// is fully pinned by the standard) and converts to doubles/bounded ints
// without touching std::uniform_*_distribution, which is not portable.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Independent stream for (base_seed, group, replica). Mixing goes through
  // splitmix64 so that nearby indices land on unrelated seeds.
  static Rng stream(std::uint64_t base_seed, std::uint64_t group,
                    std::uint64_t replica) {
    std::uint64_t s = base_seed;
    splitmix64(s);
    s ^= 0x517cc1b727220a95ULL * (group + 1);
    splitmix64(s);
    s ^= 0x2545f4914f6cdd1dULL * (replica + 1);
    return Rng(splitmix64(s));
  }

  std::uint64_t next() { return engine_(); }

  // Uniform on [0,1); 53-bit resolution, never returns 1.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Uniform integer in [0, bound); bound >= 1. Lemire reduction with
  // rejection, so the result is exactly uniform.
  std::uint32_t below(std::uint32_t bound) {
    std::uint32_t x = static_cast<std::uint32_t>(engine_() >> 32);
    std::uint64_t m = static_cast<std::uint64_t>(x) * bound;
    std::uint32_t low = static_cast<std::uint32_t>(m);
    if (low < bound) {
      std::uint32_t threshold = (0u - bound) % bound;
      while (low < threshold) {
        x = static_cast<std::uint32_t>(engine_() >> 32);
        m = static_cast<std::uint64_t>(x) * bound;
        low = static_cast<std::uint32_t>(m);
      }
    }
    return static_cast<std::uint32_t>(m >> 32);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace forest_spectra
