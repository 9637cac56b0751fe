#pragma once

#include <cstdint>

namespace pp {

// SplitMix64.  The state advances by a fixed odd increment and each output is
// a bijective mix of the state, so the generator is effectively counter-based:
// a stream is fully determined by its starting state, and disjoint streams can
// be consumed in any order.  All Monte Carlo sampling in this project draws
// from per-block substreams derived from (seed, block index), which makes the
// results independent of the number of worker threads.
struct SplitMix64 {
  std::uint64_t state = 0;

  SplitMix64() = default;
  explicit SplitMix64(std::uint64_t seed) : state(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  // uniform on [0,1), 53-bit resolution
  double next_unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // uniform on [-1/2, 1/2); the missing right endpoint has measure zero
  double next_box() { return next_unit() - 0.5; }
};

// Substream seed for worker `stream` of a run seeded by `seed`.  Both inputs
// go through the output mix so that low-entropy seeds (0, 1, 2, ...) still
// yield well-separated streams.
inline std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t stream) {
  SplitMix64 g(seed ^ (0xA3EC647659359ACDull * (stream + 1)));
  g.next();
  return g.next();
}

}  // namespace pp
