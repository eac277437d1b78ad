#include <gtest/gtest.h>

#include <filesystem>
#include <random>

#include "oracles.hpp"
#include "triqrng/dodis.hpp"
#include "triqrng/errors.hpp"
#include "triqrng/toeplitz.hpp"

using namespace triqrng;

namespace {

BitBlock to_block(const oracle::Bits& b) {
  BitBlock out(b.size());
  for (std::size_t i = 0; i < b.size(); ++i) out.set(i, b[i]);
  return out;
}

}  // namespace

TEST(Toeplitz, GoldenVector) {
  const ToeplitzSeed seed(BitBlock::from_string("10110"), 4, 2);
  EXPECT_EQ(seed.entry(0, 0), true);
  std::string rows;
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 4; ++j) rows += seed.entry(i, j) ? '1' : '0';
  EXPECT_EQ(rows, "11010110");
  const auto x = BitBlock::from_string("1100");
  EXPECT_EQ(toeplitz_extract(x, seed, 2).to_string(), "01");
  EXPECT_EQ(toeplitz_extract_fast(x, seed, 2).to_string(), "01");
}

TEST(Toeplitz, NaivePathMatchesOracle) {
  std::mt19937_64 rng(21);
  for (int t = 0; t < 50; ++t) {
    const std::size_t n = 1 + rng() % 70, m = 1 + rng() % n;
    const auto s = oracle::random_bits(n + m - 1, rng), x = oracle::random_bits(n, rng);
    const ToeplitzSeed seed(to_block(s), n, m);
    EXPECT_EQ(toeplitz_extract(to_block(x), seed, m), to_block(oracle::toeplitz(s, x, m)));
  }
}

TEST(Toeplitz, FastMatchesNaiveOnOddSizes) {
  std::mt19937_64 rng(22);
  for (std::size_t n : {63u, 64u, 65u, 127u, 129u, 1536u}) {
    for (std::size_t m : {1u, 31u, 64u}) {
      if (m > n) continue;
      const auto seed = ToeplitzSeed::random(n, m, rng());
      BitBlock x(n);
      for (std::size_t i = 0; i < n; ++i) x.set(i, rng() & 1U);
      EXPECT_EQ(toeplitz_extract_fast(x, seed, m), toeplitz_extract(x, seed, m)) << n << "x" << m;
    }
  }
}

TEST(Toeplitz, IsLinearOverGf2) {
  const auto seed = ToeplitzSeed::random(200, 90, 4);
  const ToeplitzExtractor ext(seed);
  std::mt19937_64 rng(8);
  BitBlock a(200), b(200);
  for (std::size_t i = 0; i < 200; ++i) {
    a.set(i, rng() & 1U);
    b.set(i, rng() & 1U);
  }
  EXPECT_EQ(ext.extract(a ^ b), ext.extract(a) ^ ext.extract(b));
  EXPECT_EQ(ext.extract(BitBlock(200)).popcount(), 0u);
}

TEST(Toeplitz, SeedValidationAndPersistence) {
  EXPECT_THROW(ToeplitzSeed(BitBlock(4), 4, 2), std::invalid_argument);
  EXPECT_THROW(ToeplitzSeed(BitBlock(5), 2, 4), std::invalid_argument);
  const auto seed = ToeplitzSeed::random(1536, 1024, 99);
  const auto path = std::filesystem::temp_directory_path() / "triqrng_seed_test.bin";
  seed.save(path);
  EXPECT_EQ(std::filesystem::file_size(path), 8u + (1536 + 1024 - 1 + 7) / 8);
  EXPECT_EQ(ToeplitzSeed::load(path), seed);
  std::filesystem::remove(path);
}

TEST(Toeplitz, RejectsWrongInputLength) {
  const auto seed = ToeplitzSeed::random(16, 8, 1);
  EXPECT_THROW(toeplitz_extract_fast(BitBlock(15), seed, 8), std::invalid_argument);
  EXPECT_THROW(toeplitz_extract(BitBlock(16), seed, 9), std::invalid_argument);
}

TEST(Dodis, AdmissiblePrimes) {
  EXPECT_EQ(admissible_primes(61), (std::vector<std::size_t>{3, 5, 11, 13, 19, 29, 37, 53, 59, 61}));
  EXPECT_FALSE(is_dodis_admissible(7));  // 2 has order 3 mod 7
  EXPECT_FALSE(is_dodis_admissible(9));
  EXPECT_EQ(next_admissible_prime(512), 523u);
}

TEST(Dodis, CyclicConvolutionMatchesOracle) {
  std::mt19937_64 rng(31);
  for (std::size_t n : {3u, 13u, 64u, 65u, 131u, 523u}) {
    const auto x = oracle::random_bits(n, rng), y = oracle::random_bits(n, rng);
    EXPECT_EQ(cyclic_convolution(to_block(x), to_block(y)), to_block(oracle::cyclic_convolution(x, y))) << n;
  }
}

TEST(Dodis, ConvolutionIsCommutative) {
  std::mt19937_64 rng(2);
  const auto x = to_block(oracle::random_bits(523, rng)), y = to_block(oracle::random_bits(523, rng));
  EXPECT_EQ(cyclic_convolution(x, y), cyclic_convolution(y, x));
}

TEST(Dodis, ExtractValidates) {
  EXPECT_THROW(dodis_extract(BitBlock(7), BitBlock(7), 3), std::invalid_argument);
  EXPECT_THROW(dodis_extract(BitBlock(11), BitBlock(11), 12), std::invalid_argument);
  EXPECT_THROW(dodis_extract(BitBlock(11), BitBlock(13), 3), std::invalid_argument);
  EXPECT_EQ(dodis_extract(BitBlock(11), BitBlock(11), 5).size(), 5u);
}

TEST(Dodis, SeedChainDrawsDocumentedBlockCount) {
  std::mt19937_64 rng(17);
  std::size_t drawn = 0;
  const BitBlockStream stream = [&]() -> std::optional<BitBlock> {
    ++drawn;
    return to_block(oracle::random_bits(528, rng));
  };
  const auto seed = seed_chain(stream, 1536, 1024);
  EXPECT_EQ(seed.n(), 1536u);
  EXPECT_EQ(seed.m(), 1024u);
  EXPECT_EQ(drawn, seed_chain_block_count(1536, 1024));
  EXPECT_EQ(drawn, 40u);  // 20 calls of 128 bits cover 2559 seed bits
}

TEST(Dodis, SeedChainReportsExhaustionAndShortBlocks) {
  int left = 3;
  const BitBlockStream dry = [&]() -> std::optional<BitBlock> {
    if (left-- <= 0) return std::nullopt;
    return BitBlock(600);
  };
  EXPECT_THROW(seed_chain(dry, 1536, 1024), StreamExhausted);
  const BitBlockStream short_blocks = [] { return std::optional<BitBlock>(BitBlock(100)); };
  EXPECT_THROW(seed_chain(short_blocks, 1536, 1024), std::invalid_argument);
}
