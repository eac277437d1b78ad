#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "triqrng/bitblock.hpp"
#include "triqrng/gf2.hpp"

using namespace triqrng;

TEST(BitBlock, StringRoundTrip) {
  const auto b = BitBlock::from_string("1011001110001");
  EXPECT_EQ(b.size(), 13u);
  EXPECT_EQ(b.to_string(), "1011001110001");
  EXPECT_EQ(b.popcount(), 7u);
}

TEST(BitBlock, BytesAreMsbFirst) {
  const std::vector<std::uint8_t> bytes{0x80, 0x01};
  const auto b = BitBlock::from_bytes(bytes);
  EXPECT_TRUE(b.get(0));
  EXPECT_FALSE(b.get(1));
  EXPECT_TRUE(b.get(15));
  EXPECT_EQ(b.to_bytes(), bytes);
}

TEST(BitBlock, PartialByteLength) {
  const auto b = BitBlock::from_bytes(std::vector<std::uint8_t>{0xFF}, 3);
  EXPECT_EQ(b.to_string(), "111");
  EXPECT_EQ(b.to_bytes(), std::vector<std::uint8_t>{0xE0});
}

TEST(BitBlock, AppendSliceAcrossWords) {
  std::mt19937_64 rng(3);
  BitBlock a(100), b(77);
  for (std::size_t i = 0; i < a.size(); ++i) a.set(i, rng() & 1U);
  for (std::size_t i = 0; i < b.size(); ++i) b.set(i, rng() & 1U);
  BitBlock c = a;
  c.append(b);
  ASSERT_EQ(c.size(), 177u);
  EXPECT_EQ(c.slice(0, 100), a);
  EXPECT_EQ(c.slice(100, 77), b);
  EXPECT_EQ(c.popcount(), a.popcount() + b.popcount());
}

TEST(BitBlock, XorAndPaddingStayClean) {
  auto a = BitBlock::from_string("1100");
  a ^= BitBlock::from_string("1010");
  EXPECT_EQ(a.to_string(), "0110");
  const auto w = BitBlock::from_words({~std::uint64_t{0}}, 5);
  EXPECT_EQ(w.popcount(), 5u);
  EXPECT_THROW(a ^= BitBlock::from_string("1"), std::invalid_argument);
}

TEST(BitBlock, PackCodesTwosComplementMsbFirst) {
  const std::vector<std::int32_t> codes{-1, 2};
  EXPECT_EQ(pack_codes(codes, 4).to_string(), "11110010");
  const std::vector<std::int32_t> wide{-32768, 32767};
  EXPECT_EQ(pack_codes(wide, 16).to_string(), "10000000000000000111111111111111");
}

TEST(Gf2, PortableClmulMatchesShiftAndAdd) {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 2000; ++t) {
    const std::uint64_t a = rng(), b = rng();
    std::uint64_t lo = 0, hi = 0;
    for (int i = 0; i < 64; ++i)
      if ((b >> i) & 1U) {
        lo ^= a << i;
        if (i) hi ^= a >> (64 - i);
      }
    const auto p = gf2::clmul64_portable(a, b);
    ASSERT_EQ(p.lo, lo);
    ASSERT_EQ(p.hi, hi);
  }
}

TEST(Gf2, FastAndPortableMultiplyAgree) {
  std::mt19937_64 rng(5);
  for (std::size_t na : {1u, 2u, 7u, 24u}) {
    for (std::size_t nb : {1u, 3u, 17u}) {
      std::vector<std::uint64_t> a(na), b(nb);
      for (auto& x : a) x = rng();
      for (auto& x : b) x = rng();
      EXPECT_EQ(gf2::multiply(a, b), gf2::multiply_portable(a, b));
    }
  }
}

TEST(Gf2, MultiplyMatchesBitwiseProduct) {
  std::mt19937_64 rng(9);
  const auto x = oracle::random_bits(150, rng), y = oracle::random_bits(90, rng);
  BitBlock bx(150), by(90);
  for (std::size_t i = 0; i < 150; ++i) bx.set(i, x[i]);
  for (std::size_t i = 0; i < 90; ++i) by.set(i, y[i]);
  const auto p = gf2::multiply(bx.words(), by.words());
  const auto prod = BitBlock::from_words(p, 239);
  for (std::size_t k = 0; k < 239; ++k) {
    int bit = 0;
    for (std::size_t i = 0; i < 150; ++i)
      if (k >= i && k - i < 90) bit ^= x[i] & y[k - i];
    ASSERT_EQ(prod.get(k), bit) << k;
  }
}
