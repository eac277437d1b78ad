#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "triqrng/adc.hpp"
#include "triqrng/gaussian.hpp"
#include "triqrng/random.hpp"
#include "triqrng/source.hpp"

using namespace triqrng;

TEST(RecursiveMatrix, HadamardIsOrthogonal) {
  const auto h = RecursiveMatrix::hadamard(4);
  EXPECT_DOUBLE_EQ(h(0, 0), 0.5);
  EXPECT_DOUBLE_EQ(h(1, 1), -0.5);
  EXPECT_DOUBLE_EQ(h(3, 3), 0.5);
  EXPECT_THROW(RecursiveMatrix::hadamard(3), std::invalid_argument);
  EXPECT_THROW(RecursiveMatrix(2, {1, 1, 0, 1}), std::invalid_argument);
  EXPECT_NO_THROW(RecursiveMatrix(2, {0, 1, -1, 0}));
}

TEST(Wallace, MsbTruncateKeepsSign) {
  const std::vector<std::int32_t> c{-32768, -1, 0, 1, 32767, 4096};
  EXPECT_EQ(msb_truncate(c, 16, 11), (std::vector<std::int32_t>{-1024, -1, 0, 0, 1023, 128}));
  EXPECT_THROW(msb_truncate(c, 16, 17), std::invalid_argument);
}

TEST(Wallace, ChooseMsbBits) {
  EXPECT_EQ(choose_msb_bits(0.70, 16), 11);
  EXPECT_EQ(choose_msb_bits(0.727, 16), 11);
  EXPECT_EQ(choose_msb_bits(0.75, 16), 12);
  EXPECT_EQ(choose_msb_bits(0.01, 16), 1);
}

TEST(Wallace, OutputPrecisionIsMPlusKMinusOne) {
  GaussianOptions o;
  o.pool_size = 4096;
  AdcSpec spec = AdcSpec::paper_like();
  const auto [ci, cq] = quantize(simulate_quadratures(NoiseModel::paper_like(), 4096, 1), spec);
  const auto r = extract_gaussian_channel(ci, 11, 1, o);
  EXPECT_EQ(r.n_out, 14);
  const Requantizer rq(14);
  for (auto c : r.codes) ASSERT_LE(std::abs(c), rq.max_code());
}

TEST(Wallace, PassPreservesEnergyAndPermutesAsDocumented) {
  std::vector<double> v(16);
  std::iota(v.begin(), v.end(), 1.0);
  auto pool = normalize_pool(v, 4);
  EXPECT_NEAR(pool.mean_square(), 1.0, 1e-15);
  const auto before = pool.values;
  wallace_pass(pool, RecursiveMatrix::identity(4));
  // identity matrix: column c (v[c], v[c+4], v[c+8], v[c+12]) lands at v[4c .. 4c+3]
  for (std::size_t c = 0; c < 4; ++c)
    for (std::size_t r = 0; r < 4; ++r) EXPECT_DOUBLE_EQ(pool.values[c * 4 + r], before[c + 4 * r]);
  wallace_pass(pool, RecursiveMatrix::hadamard(4));
  EXPECT_NEAR(pool.mean_square(), 1.0, 1e-14);
  EXPECT_EQ(pool.pass_count, 2);
}

TEST(Wallace, NormalizeRejectsDegeneratePools) {
  EXPECT_THROW(normalize_pool(std::vector<double>(8, 0.0), 4), std::invalid_argument);
  EXPECT_THROW(normalize_pool(std::vector<double>(6, 1.0), 4), std::invalid_argument);
}

TEST(Wallace, RequantizerRoundsAndClamps) {
  const Requantizer rq(4, 4.0);  // step 0.5, codes -7..7
  EXPECT_DOUBLE_EQ(rq.step(), 0.5);
  EXPECT_EQ(rq.code(0.74), 1);
  EXPECT_EQ(rq.code(0.76), 2);
  EXPECT_EQ(rq.code(-100.0), -rq.max_code());
  EXPECT_EQ(rq.code(100.0), rq.max_code());
}

TEST(Wallace, PassesTurnUniformIntoGaussian) {
  // A flat pool is far from Gaussian; mixing passes drive it there.
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<std::int32_t> u(-1024, 1023);
  CodeBlock cb;
  cb.spec.bits = 11;
  cb.codes.resize(65536);
  for (auto& c : cb.codes) c = u(rng);
  GaussianOptions o;
  const auto raw = extract_gaussian_channel(cb, 11, 1, o);
  EXPECT_FALSE(raw.ks.pass);
  const auto mixed = extract_gaussian_channel(cb, 11, 6, o);
  EXPECT_TRUE(mixed.ks.pass) << mixed.ks.p_value;
  EXPECT_TRUE(mixed.chi2.pass) << mixed.chi2.p_value;
}

TEST(Wallace, AutoPassesStopsOnceGofPasses) {
  const AdcSpec spec = AdcSpec::paper_like();
  const auto [ci, cq] = quantize(simulate_quadratures(NoiseModel::paper_like(), 65536, 11), spec);
  GaussianOptions o;
  o.auto_passes = true;
  const auto r = extract_gaussian_channel(ci, 11, 0, o);
  EXPECT_GE(r.passes, 1);
  EXPECT_LE(r.passes, o.max_auto_passes);
  EXPECT_TRUE(r.ks.pass);
}

TEST(Wallace, RequiresAFullPool) {
  CodeBlock cb;
  cb.codes.resize(1000);
  EXPECT_THROW(extract_gaussian_channel(cb, 11, 5), std::invalid_argument);
}
