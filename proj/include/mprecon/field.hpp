#pragma once

/// Prime-field arithmetic over F_p with a runtime modulus, and the base-p
/// digit encoding that maps 64-bit keys and checksums into (F_p)^b.

#include <bit>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mprecon/error.hpp"

namespace mprecon {

/// An element of F_p, always reduced.
struct Scalar {
  std::uint64_t value = 0;

  friend constexpr bool operator==(Scalar, Scalar) = default;
};

/// Fixed-length vector over F_p, little-endian digit order.
using FVector = std::vector<std::uint64_t>;

using u128 = unsigned __int128;

namespace detail {

constexpr std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return static_cast<std::uint64_t>(static_cast<u128>(a) * b % m);
}

constexpr std::uint64_t powmod(std::uint64_t base, std::uint64_t exp, std::uint64_t m) {
  std::uint64_t result = 1 % m;
  base %= m;
  while (exp != 0) {
    if (exp & 1) result = mulmod(result, base, m);
    base = mulmod(base, base, m);
    exp >>= 1;
  }
  return result;
}

}  // namespace detail

/// Deterministic Miller-Rabin; the first twelve prime bases are a witness
/// set for every n < 2^64.
constexpr bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  constexpr std::uint64_t kBases[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
  for (std::uint64_t b : kBases) {
    if (n % b == 0) return n == b;
  }
  std::uint64_t d = n - 1;
  int r = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++r;
  }
  for (std::uint64_t a : kBases) {
    std::uint64_t x = detail::powmod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool witness = true;
    for (int i = 1; i < r; ++i) {
      x = detail::mulmod(x, x, n);
      if (x == n - 1) {
        witness = false;
        break;
      }
    }
    if (witness) return false;
  }
  return true;
}

/// Smallest b with p^b >= bound (bound given as a 128-bit value so 2^64 fits).
constexpr unsigned min_digits(std::uint64_t p, u128 bound) {
  unsigned b = 0;
  u128 reach = 1;
  while (reach < bound) {
    reach *= p;
    ++b;
  }
  return b;
}

/// Field and encoding parameters shared by every sketch in a session.
class FieldParams {
 public:
  FieldParams(std::uint64_t p, std::uint64_t q) : p_(p), q_(q) {
    if (!is_prime(p)) raise(Errc::composite_p, "modulus " + std::to_string(p) + " is not prime");
    if (p >= (std::uint64_t{1} << 63)) raise(Errc::invalid_argument, "modulus must be below 2^63");
    if (q < 2 || !std::has_single_bit(q)) {
      raise(Errc::invalid_argument, "checksum range q must be a power of two >= 2");
    }
    key_width_ = min_digits(p, u128{1} << 64);
    hash_width_ = min_digits(p, q);
  }

  std::uint64_t p() const noexcept { return p_; }
  std::uint64_t q() const noexcept { return q_; }
  unsigned key_width() const noexcept { return key_width_; }
  unsigned hash_width() const noexcept { return hash_width_; }
  /// Bits needed to store one field element.
  unsigned element_bits() const noexcept { return static_cast<unsigned>(std::bit_width(p_ - 1)); }

  std::uint64_t add(std::uint64_t a, std::uint64_t b) const noexcept {
    std::uint64_t s = a + b;
    return s >= p_ ? s - p_ : s;
  }
  std::uint64_t sub(std::uint64_t a, std::uint64_t b) const noexcept { return a >= b ? a - b : a + p_ - b; }
  std::uint64_t neg(std::uint64_t a) const noexcept { return a == 0 ? 0 : p_ - a; }
  std::uint64_t mul(std::uint64_t a, std::uint64_t b) const noexcept {
    if (p_ <= std::numeric_limits<std::uint32_t>::max()) return a * b % p_;
    return detail::mulmod(a, b, p_);
  }
  std::uint64_t pow(std::uint64_t a, std::uint64_t e) const noexcept { return detail::powmod(a, e, p_); }
  std::uint64_t reduce(std::uint64_t a) const noexcept { return a % p_; }

  Scalar scalar(std::uint64_t v) const noexcept { return Scalar{v % p_}; }

  friend bool operator==(const FieldParams& a, const FieldParams& b) {
    return a.p_ == b.p_ && a.q_ == b.q_;
  }

 private:
  std::uint64_t p_;
  std::uint64_t q_;
  unsigned key_width_ = 0;
  unsigned hash_width_ = 0;
};

inline Scalar add(Scalar a, Scalar b, const FieldParams& f) { return {f.add(a.value, b.value)}; }
inline Scalar sub(Scalar a, Scalar b, const FieldParams& f) { return {f.sub(a.value, b.value)}; }
inline Scalar mul(Scalar a, Scalar b, const FieldParams& f) { return {f.mul(a.value, b.value)}; }
inline Scalar neg(Scalar a, const FieldParams& f) { return {f.neg(a.value)}; }

/// Multiplicative inverse via Fermat; p is prime so a^(p-2) = a^-1.
inline Scalar mul_inv(Scalar a, const FieldParams& f) {
  if (a.value % f.p() == 0) raise(Errc::zero_inverse, "zero has no inverse");
  return {f.pow(a.value % f.p(), f.p() - 2)};
}

/// Little-endian base-p expansion of x padded to `width` digits.
inline FVector encode_value(std::uint64_t x, unsigned width, const FieldParams& f) {
  FVector digits(width, 0);
  std::uint64_t rest = x;
  for (unsigned i = 0; i < width && rest != 0; ++i) {
    digits[i] = rest % f.p();
    rest /= f.p();
  }
  if (rest != 0) raise(Errc::overflow, std::to_string(x) + " does not fit in " + std::to_string(width) + " digits");
  return digits;
}

/// Inverse of encode_value; nullopt when a digit is out of range or the value
/// exceeds `max_value`.
inline std::optional<std::uint64_t> try_decode_value(std::span<const std::uint64_t> digits, const FieldParams& f,
                                                     std::uint64_t max_value = std::numeric_limits<std::uint64_t>::max()) {
  u128 acc = 0;
  for (std::size_t i = digits.size(); i-- > 0;) {
    if (digits[i] >= f.p()) return std::nullopt;
    acc = acc * f.p() + digits[i];
    if (acc > max_value) return std::nullopt;
  }
  return static_cast<std::uint64_t>(acc);
}

inline std::uint64_t decode_value(std::span<const std::uint64_t> digits, const FieldParams& f,
                                  std::uint64_t max_value = std::numeric_limits<std::uint64_t>::max()) {
  auto x = try_decode_value(digits, f, max_value);
  if (!x) raise(Errc::out_of_domain, "vector does not decode to a key in the configured domain");
  return *x;
}

// Componentwise vector helpers over spans of reduced digits.

inline void add_into(std::span<std::uint64_t> dst, std::span<const std::uint64_t> src, const FieldParams& f) {
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = f.add(dst[i], src[i]);
}

/// dst += c * src
inline void axpy(std::span<std::uint64_t> dst, std::uint64_t c, std::span<const std::uint64_t> src,
                 const FieldParams& f) {
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = f.add(dst[i], f.mul(c, src[i]));
}

inline void scale_in_place(std::span<std::uint64_t> v, std::uint64_t c, const FieldParams& f) {
  for (auto& d : v) d = f.mul(c, d);
}

}  // namespace mprecon
