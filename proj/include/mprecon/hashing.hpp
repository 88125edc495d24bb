#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <string>
#include <vector>

#include "mprecon/error.hpp"
#include "mprecon/field.hpp"

namespace mprecon {

inline constexpr unsigned kMinHashes = 3;
inline constexpr unsigned kMaxHashes = 7;

/// splitmix64 finalizer; a bijection on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Seeded digest with domain separation:
///   s = mix64(seed + 0x9E3779B97F4A7C15 * (domain + 1))
///   digest = mix64(mix64(key ^ s) + s)
constexpr std::uint64_t digest(std::uint64_t seed, std::uint64_t domain, std::uint64_t key) {
  const std::uint64_t s = mix64(seed + 0x9E3779B97F4A7C15ULL * (domain + 1));
  return mix64(mix64(key ^ s) + s);
}

/// Domain tag of the checksum hash; position hashes use domains 0..k-1.
inline constexpr std::uint64_t kChecksumDomain = 0xC5C5'0000'0000'0001ULL;

/// Per-trial seed derivation for simulations.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  return digest(master, 0x5EED'0000'0000'0000ULL, index);
}

struct HashConfig {
  unsigned k = 4;
  std::uint32_t subtable_size = 1;
  std::uint64_t position_seed = 0;
  std::uint64_t checksum_seed = 0;
  std::uint64_t q = std::uint64_t{1} << 32;

  std::size_t table_size() const noexcept { return std::size_t{k} * subtable_size; }
  bool growable() const noexcept { return std::has_single_bit(subtable_size); }

  void validate() const {
    if (k < kMinHashes) raise(Errc::unsupported_k, "need at least 3 hash functions, got " + std::to_string(k));
    if (k > 255) raise(Errc::unsupported_k, "hash count must fit in one byte");
    if (subtable_size == 0) raise(Errc::invalid_argument, "subtable size must be positive");
    if (q < 2 || !std::has_single_bit(q)) raise(Errc::invalid_argument, "q must be a power of two >= 2");
  }

  friend bool operator==(const HashConfig&, const HashConfig&) = default;
};

/// Same seeds, twice the subtable size.
inline HashConfig doubled(HashConfig cfg) {
  cfg.subtable_size *= 2;
  return cfg;
}

/// Offset of the key inside subtable `i`. Multiply-shift range reduction on
/// the full digest: for s = 2^r this is the top r digest bits, so doubling s
/// appends one low-order bit (new offset = 2 * old + bit).
inline std::uint32_t subtable_offset(std::uint64_t key, unsigned i, const HashConfig& cfg) {
  const std::uint64_t d = digest(cfg.position_seed, i, key);
  return static_cast<std::uint32_t>((static_cast<u128>(d) * cfg.subtable_size) >> 64);
}

/// The k cell indices of a key; index i lies in subtable i.
inline std::vector<std::size_t> cell_positions(std::uint64_t key, const HashConfig& cfg) {
  std::vector<std::size_t> out(cfg.k);
  for (unsigned i = 0; i < cfg.k; ++i) {
    out[i] = std::size_t{i} * cfg.subtable_size + subtable_offset(key, i, cfg);
  }
  return out;
}

inline std::uint64_t checksum(std::uint64_t key, const HashConfig& cfg) {
  return digest(cfg.checksum_seed, kChecksumDomain, key) & (cfg.q - 1);
}

}  // namespace mprecon
