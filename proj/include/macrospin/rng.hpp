#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace macrospin {

// All randomness flows through explicitly passed engines; nothing global.
using Rng = std::mt19937_64;

// Stream identifiers keep seeds for different purposes decorrelated even when
// they share a master seed and index tuple.
enum class Stream : std::uint64_t {
  cell = 0x01,
  disorder = 0x02,
  state = 0x03,
  optimizer = 0x04,
  lbit = 0x05,
  validation = 0x06,
};

// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x) noexcept;

// Counter-based derivation: hash of (master, stream, indices...). Order of the
// indices matters, evaluation order of callers does not.
std::uint64_t derive_seed(std::uint64_t master, Stream stream,
                          std::initializer_list<std::uint64_t> indices = {}) noexcept;

// Uniform double in [0, 1) using the top 53 bits of one draw; bit-identical
// across standard library implementations, unlike std::uniform_real_distribution.
double uniform01(Rng& rng) noexcept;

// Uniform double in [lo, hi).
double uniform(Rng& rng, double lo, double hi) noexcept;

}  // namespace macrospin
