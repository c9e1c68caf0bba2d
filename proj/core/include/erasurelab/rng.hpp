#pragma once

#include <cstdint>
#include <random>

namespace erasurelab {

// Every random quantity in the library is drawn from std::mt19937_64.
// Independent streams are derived from a master seed with split(), so the
// stream used by trial k never depends on which thread runs it.
using Rng = std::mt19937_64;

// SplitMix64 finalizer (Steele, Lea & Flood 2014).
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Seed of stream `index` under `master`.
constexpr std::uint64_t split(std::uint64_t master, std::uint64_t index) {
  return mix64(mix64(master) ^ mix64(index + 0x632be59bd9b4e019ULL));
}

inline Rng make_stream(std::uint64_t master, std::uint64_t index) {
  return Rng(split(master, index));
}

// Uniform double in [0, 1) with 53 random bits.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Uniform integer in [0, bound). Multiply-high reduction; the bias is below
// bound / 2^64.
inline std::uint64_t uniform_below(Rng& rng, std::uint64_t bound) {
  __extension__ using u128 = unsigned __int128;
  return static_cast<std::uint64_t>((static_cast<u128>(rng()) * bound) >> 64);
}

}  // namespace erasurelab
