#pragma once

#include <bit>
#include <cstdint>
#include <initializer_list>
#include <random>

namespace mdshrink {

/// All random draws in the library come from per-repetition mt19937_64
/// streams whose seeds are derived from a master seed with a splitmix64
/// chain.  Streams are keyed by value (cell parameters and repetition
/// index), so results do not depend on execution order or the worker
/// budget.
using Rng = std::mt19937_64;

inline constexpr const char* kRngAlgorithm = "splitmix64-keyed mt19937_64 streams";

/// One splitmix64 output step (Steele, Lea, Flood 2014).
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

/// Stream seed: fold each key into the chain with one splitmix64 step.
inline std::uint64_t derive_stream(std::uint64_t master,
                                   std::initializer_list<std::uint64_t> keys) {
  std::uint64_t s = splitmix64(master);
  for (std::uint64_t k : keys) s = splitmix64(s ^ splitmix64(k));
  return s;
}

inline Rng make_stream_rng(std::uint64_t master, std::initializer_list<std::uint64_t> keys) {
  return Rng(derive_stream(master, keys));
}

/// Bit pattern of a double, for keying streams by parameter value.
inline std::uint64_t key_bits(double v) { return std::bit_cast<std::uint64_t>(v); }

}  // namespace mdshrink
