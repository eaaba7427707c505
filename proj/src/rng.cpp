#include "crkbs/rng.hpp"

#include <cmath>
#include <numbers>

namespace crkbs {

double RandomEngine::normal() {
  // (0,1) uniforms: offset by half an ulp so log never sees zero.
  double u1 = (static_cast<double>(next_u64() >> 12) + 0.5) * 0x1.0p-52;
  double u2 = static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t derive_seed(std::uint64_t root, std::uint64_t stream) {
  // splitmix64 finalizer over the combined value.
  std::uint64_t z = root + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace crkbs
