#pragma once

// Seeded, addressable random bits for the LCAs. Every bit is a pure function
// of the seed and its address, so answers never depend on query order.

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace poset_lca {

/// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t hash_combine(std::uint64_t seed, std::uint64_t value) {
  return mix64(seed ^ mix64(value + 0x632be59bd9b4e019ULL));
}

/// Derived seed for a sub-computation (stage, attempt, trial, ...).
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  return hash_combine(mix64(master), index);
}

enum class TapeMode {
  prf,          ///< hash of seed and address
  exact_kwise,  ///< degree-(k-1) polynomial over GF(2^61 - 1)
};

class RandomTape {
 public:
  static constexpr std::uint64_t kPrime = (std::uint64_t{1} << 61) - 1;

  static RandomTape prf(std::uint64_t seed) { return RandomTape(seed, TapeMode::prf, 0); }

  /// Any k bits at distinct addresses are k-wise independent (each bit is the
  /// low bit of a uniform field element, bias 1/(2p)).
  static RandomTape exact_kwise(std::uint64_t seed, unsigned k) {
    if (k < 1) throw std::invalid_argument("k-wise independence needs k >= 1");
    return RandomTape(seed, TapeMode::exact_kwise, k);
  }

  static RandomTape make(TapeMode mode, std::uint64_t seed, unsigned k) {
    return mode == TapeMode::prf ? prf(seed) : exact_kwise(seed, k);
  }

  /// Independent tape for one sorter stage.
  RandomTape for_stage(std::uint64_t stage) const {
    return RandomTape(derive_seed(seed_, stage), mode_, k_);
  }

  std::uint64_t seed() const { return seed_; }
  TapeMode mode() const { return mode_; }
  unsigned k() const { return k_; }

  bool bit(std::uint64_t round, std::uint64_t vertex, unsigned index) const {
    ++bits_read_;
    return raw_bit(round, vertex, index);
  }

  bool bit(std::uint64_t stage, std::uint64_t round, std::uint64_t vertex, unsigned index) const {
    return for_stage(stage).bit(round, vertex, index);
  }

  /// True iff bits 0..count-1 at (round, vertex) are all zero, i.e. an event
  /// of probability exactly 2^-count. Bits are read lazily.
  bool all_zero(std::uint64_t round, std::uint64_t vertex, unsigned count) const {
    if (mode_ == TapeMode::prf) {
      for (unsigned block = 0; block * 64 < count; ++block) {
        const unsigned take = std::min(64u, count - block * 64);
        const std::uint64_t word = prf_word(round, vertex, block);
        const std::uint64_t mask = take == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << take) - 1;
        bits_read_ += take;
        if (word & mask) return false;
      }
      return true;
    }
    for (unsigned i = 0; i < count; ++i)
      if (bit(round, vertex, i)) return false;
    return true;
  }

  std::uint64_t bits_read() const { return bits_read_; }
  void reset_counter() { bits_read_ = 0; }

 private:
  RandomTape(std::uint64_t seed, TapeMode mode, unsigned k) : seed_(seed), mode_(mode), k_(k) {
    if (mode_ == TapeMode::exact_kwise) {
      coefficients_.reserve(k_);
      std::uint64_t state = seed_;
      while (coefficients_.size() < k_) {
        state = mix64(state);
        const std::uint64_t c = state >> 3;  // 61 bits
        if (c < kPrime) coefficients_.push_back(c);
      }
    }
  }

  std::uint64_t prf_word(std::uint64_t round, std::uint64_t vertex, std::uint64_t block) const {
    return hash_combine(hash_combine(hash_combine(seed_, round), vertex), block);
  }

  static std::uint64_t mulmod(std::uint64_t a, std::uint64_t b) {
    const unsigned __int128 p = static_cast<unsigned __int128>(a) * b;
    std::uint64_t lo = static_cast<std::uint64_t>(p & kPrime);
    std::uint64_t hi = static_cast<std::uint64_t>(p >> 61);
    std::uint64_t r = lo + hi;
    while (r >= kPrime) r -= kPrime;
    return r;
  }

  // Address packing for the polynomial family: index (8 bits), round
  // (10 bits), vertex (42 bits).
  static std::uint64_t pack(std::uint64_t round, std::uint64_t vertex, unsigned index) {
    if (index >= (1u << 8) || round >= (1u << 10) || vertex >= (std::uint64_t{1} << 42))
      throw std::out_of_range("address outside the exact k-wise tape domain");
    return (vertex << 18) | (round << 8) | index;
  }

  bool raw_bit(std::uint64_t round, std::uint64_t vertex, unsigned index) const {
    if (mode_ == TapeMode::prf) return (prf_word(round, vertex, index / 64) >> (index % 64)) & 1u;
    const std::uint64_t x = pack(round, vertex, index);
    std::uint64_t acc = 0;
    for (auto it = coefficients_.rbegin(); it != coefficients_.rend(); ++it) {
      acc = mulmod(acc, x) + *it;
      if (acc >= kPrime) acc -= kPrime;
    }
    return acc & 1u;
  }

  std::uint64_t seed_;
  TapeMode mode_;
  unsigned k_;
  std::vector<std::uint64_t> coefficients_;
  mutable std::uint64_t bits_read_ = 0;
};

}  // namespace poset_lca
