#pragma once

#include <cstdint>
#include <random>

namespace crkbs {

// Deterministic random engine. std::mt19937_64 has a fixed bit stream, but
// the standard distributions are implementation defined, so the transforms
// to uniform and normal variates are spelled out here. Given a seed the
// draw sequence is identical across compilers and platforms.
class RandomEngine {
 public:
  explicit RandomEngine(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  // Uniform on [0, 1): top 53 bits of the generator output.
  double uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) {
    return lo + (hi - lo) * uniform01();
  }

  // Standard normal via Box-Muller. Uses two fresh draws per variate and
  // keeps no cached state, so the stream position is a pure function of
  // the number of calls.
  double normal();

  // Fair sign flip: +1 or -1 from one generator bit.
  double sign() { return (next_u64() >> 63) ? -1.0 : 1.0; }

 private:
  std::mt19937_64 gen_;
};

// Mixes a root seed with a stream index into an independent engine seed.
// Used to give each draw (noise vector, candidate batch) its own stream
// while keeping everything reproducible from one root seed.
std::uint64_t derive_seed(std::uint64_t root, std::uint64_t stream);

}  // namespace crkbs
