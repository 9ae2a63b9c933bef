#pragma once

// All generator randomness comes from std::mt19937_64, whose output sequence
// is fixed by the standard. The standard distributions are not, so bounded
// draws use rejection sampling on the raw 64-bit outputs instead.

#include <cstdint>
#include <limits>
#include <random>

namespace bfgp {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Uniform integer in [lo, hi].
  std::int64_t uniform(std::int64_t lo, std::int64_t hi) {
    const auto range = static_cast<std::uint64_t>(hi) - static_cast<std::uint64_t>(lo) + 1;
    if (range == 0) return static_cast<std::int64_t>(next());  // full 64-bit span
    const auto limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % range;
    std::uint64_t x;
    do {
      x = next();
    } while (x >= limit);
    return static_cast<std::int64_t>(static_cast<std::uint64_t>(lo) + x % range);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace bfgp
