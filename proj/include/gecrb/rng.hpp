#pragma once

#include <cstdint>

namespace gecrb {

// One splitmix64 step: advances the state by the golden-gamma increment and
// returns the mixed output. Constants are the reference ones (Steele et al.).
inline std::uint64_t splitmix64_next(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Mix a 64-bit value once; used to derive stream seeds.
inline std::uint64_t splitmix64_mix(std::uint64_t value) {
  return splitmix64_next(value);
}

// Seeded deterministic random stream. All toolkit randomness flows through
// these streams; no ambient entropy anywhere.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : state_(seed) {}

  // Per-sentence stream: seed = splitmix64(global_seed XOR sentence id).
  static RngStream for_sentence(std::uint64_t global_seed, std::uint64_t sentence_id) {
    return RngStream(splitmix64_mix(global_seed ^ sentence_id));
  }

  std::uint64_t next_u64() { return splitmix64_next(state_); }

  // Uniform double in [0, 1) with 53 random mantissa bits.
  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform index in [0, n); n must be positive.
  std::size_t next_index(std::size_t n) {
    return static_cast<std::size_t>(
        (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

 private:
  std::uint64_t state_;
};

}  // namespace gecrb
