#pragma once

#include <cstdint>
#include <random>

#include "mprecon/field.hpp"
#include "mprecon/hashing.hpp"

namespace mprecon {

/// mt19937_64 with portable bounded draws (the standard distributions are
/// implementation-defined, which would break cross-platform replay).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform in [0, bound), Lemire's multiply-and-reject.
  std::uint64_t below(std::uint64_t bound) {
    u128 prod = static_cast<u128>(next()) * bound;
    auto low = static_cast<std::uint64_t>(prod);
    if (low < bound) {
      const std::uint64_t threshold = (0 - bound) % bound;
      while (low < threshold) {
        prod = static_cast<u128>(next()) * bound;
        low = static_cast<std::uint64_t>(prod);
      }
    }
    return static_cast<std::uint64_t>(prod >> 64);
  }

  /// Uniform nonzero element of F_p.
  Scalar nonzero(const FieldParams& f) { return Scalar{1 + below(f.p() - 1)}; }

  /// Bernoulli(prob) from 53 random bits.
  bool chance(double prob) { return static_cast<double>(next() >> 11) * 0x1.0p-53 < prob; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace mprecon
