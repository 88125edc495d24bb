#include <gtest/gtest.h>

#include <limits>

#include "mprecon/field.hpp"

using namespace mprecon;

namespace {

constexpr std::uint64_t kBigPrime = 1000000007;

}  // namespace

TEST(FieldParams, RejectsCompositeModulus) {
  for (std::uint64_t p : {0ULL, 1ULL, 4ULL, 9ULL, 1000000006ULL, 561ULL, 3215031751ULL}) {
    try {
      FieldParams f(p, 256);
      ADD_FAILURE() << p << " accepted";
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), Errc::composite_p) << p;
    }
  }
}

TEST(FieldParams, PrimalityAgreesWithTrialDivision) {
  auto slow = [](std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t d = 2; d * d <= n; ++d)
      if (n % d == 0) return false;
    return true;
  };
  for (std::uint64_t n = 0; n < 20000; ++n) ASSERT_EQ(is_prime(n), slow(n)) << n;
  EXPECT_TRUE(is_prime(kBigPrime));
  EXPECT_TRUE(is_prime((1ULL << 61) - 1));
  EXPECT_FALSE(is_prime(3825123056546413051ULL));  // strong pseudoprime to bases 2..23
}

TEST(FieldParams, DigitWidths) {
  FieldParams f(kBigPrime, 1ULL << 32);
  EXPECT_EQ(f.key_width(), 3u);  // p^2 < 2^64 <= p^3
  EXPECT_EQ(f.hash_width(), 2u);
  EXPECT_EQ(f.element_bits(), 30u);
  FieldParams two(2, 256);
  EXPECT_EQ(two.key_width(), 64u);
  EXPECT_EQ(two.hash_width(), 8u);
}

TEST(MulInv, Examples) {
  EXPECT_EQ(mul_inv(Scalar{3}, FieldParams(7, 2)).value, 5u);
  EXPECT_EQ(mul_inv(Scalar{1}, FieldParams(kBigPrime, 2)).value, 1u);
  try {
    mul_inv(Scalar{0}, FieldParams(5, 2));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::zero_inverse);
  }
}

TEST(FieldLaws, ExhaustiveSmallPrimes) {
  for (std::uint64_t p : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31}) {
    FieldParams f(p, 2);
    for (std::uint64_t a = 0; a < p; ++a) {
      EXPECT_EQ(f.add(a, f.neg(a)), 0u);
      if (a != 0) {
        EXPECT_EQ(f.mul(a, mul_inv(Scalar{a}, f).value), 1u);
      }
      for (std::uint64_t b = 0; b < p; ++b) {
        ASSERT_EQ(f.add(a, b), (a + b) % p);
        ASSERT_EQ(f.sub(a, b), (a + p - b) % p);
        ASSERT_EQ(f.mul(a, b), a * b % p);
        for (std::uint64_t c = 0; c < p; ++c) {
          ASSERT_EQ(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
        }
      }
    }
  }
}

TEST(FieldLaws, LargePrimeAgreesWithWideArithmetic) {
  const std::uint64_t p = (1ULL << 61) - 1;
  FieldParams f(p, 2);
  std::uint64_t a = 0x123456789ABCDEFULL % p, b = 0x0FEDCBA987654321ULL % p;
  for (int i = 0; i < 1000; ++i) {
    ASSERT_EQ(f.mul(a, b), static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % p));
    a = f.add(f.mul(a, a), 12345);
    b = f.sub(b, a);
  }
}

TEST(EncodeValue, Examples) {
  FieldParams f5(5, 2);
  EXPECT_EQ(encode_value(23, 3, f5), (FVector{3, 4, 0}));
  EXPECT_EQ(encode_value(0, 3, f5), (FVector{0, 0, 0}));
  try {
    encode_value(125, 3, f5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::overflow);
  }
}

TEST(EncodeValue, MaxKeyMatchesBigIntegerDivision) {
  FieldParams f(kBigPrime, 2);
  const std::uint64_t x = std::numeric_limits<std::uint64_t>::max();
  // Independent oracle: repeated 128-bit division.
  FVector expected;
  unsigned __int128 rest = x;
  for (int i = 0; i < 3; ++i) {
    expected.push_back(static_cast<std::uint64_t>(rest % kBigPrime));
    rest /= kBigPrime;
  }
  ASSERT_EQ(rest, 0u);
  EXPECT_EQ(encode_value(x, 3, f), expected);
  EXPECT_EQ(expected, (FVector{582344007, 446743818, 18}));
  EXPECT_EQ(decode_value(expected, f), x);
}

TEST(DecodeValue, Examples) {
  FieldParams f5(5, 2);
  EXPECT_EQ(decode_value(FVector{3, 4, 0}, f5), 23u);
  EXPECT_EQ(decode_value(FVector{0, 0, 0}, f5), 0u);
  EXPECT_EQ(decode_value(FVector{4, 4, 4}, f5), 124u);
  EXPECT_EQ(decode_value(FVector{4, 4, 4}, f5, 124), 124u);
  try {
    decode_value(FVector{4, 4, 4}, f5, 123);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::out_of_domain);
  }
}

TEST(DecodeValue, RejectsVectorsBeyond64Bits) {
  FieldParams f(kBigPrime, 2);
  EXPECT_FALSE(try_decode_value(FVector{582344008, 446743818, 18}, f));
  EXPECT_FALSE(try_decode_value(FVector{0, 0, kBigPrime - 1}, f));
  EXPECT_FALSE(try_decode_value(FVector{kBigPrime, 0, 0}, f));
}

TEST(EncodeValue, RoundTripProperty) {
  for (std::uint64_t p : {std::uint64_t{2}, std::uint64_t{3}, std::uint64_t{257}, kBigPrime, (std::uint64_t{1} << 61) - 1}) {
    FieldParams f(p, 2);
    std::uint64_t x = 0x9E3779B97F4A7C15ULL;
    for (int i = 0; i < 2000; ++i) {
      x = x * 6364136223846793005ULL + 1442695040888963407ULL;
      const std::uint64_t v = x >> (i % 64);
      ASSERT_EQ(decode_value(encode_value(v, f.key_width(), f), f), v);
    }
  }
}
