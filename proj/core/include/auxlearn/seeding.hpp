#pragma once

#include <cstdint>
#include <string_view>

namespace auxlearn {

/// Derives a per-stage seed from one top-level seed, so that every random
/// stage of an experiment (data generation, split assignment, model init,
/// shuffling, ...) is independently reproducible.
///
/// Scheme: FNV-1a over the stage name, xor'd into the base seed, then run
/// through the splitmix64 finalizer.
inline std::uint64_t derive_seed(std::uint64_t base, std::string_view stage) {
  std::uint64_t h = 1469598103934665603ull;
  for (char c : stage) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ull;
  }
  std::uint64_t z = base ^ h;
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace auxlearn
