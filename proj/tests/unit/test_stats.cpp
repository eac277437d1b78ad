#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "triqrng/random.hpp"
#include "triqrng/stats.hpp"

using namespace triqrng;

namespace {

BitBlock random_block(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  BitBlock b(n);
  for (std::size_t i = 0; i < n; ++i) b.set(i, rng() & 1U);
  return b;
}

BitBlock pattern(std::size_t n, bool alternating) {
  BitBlock b(n);
  for (std::size_t i = 0; i < n; ++i) b.set(i, alternating ? (i % 2 == 0) : true);
  return b;
}

}  // namespace

TEST(Stats, BasicMoments) {
  const std::vector<double> x{1, 2, 3, 4}, y{2, 4, 6, 8};
  EXPECT_DOUBLE_EQ(mean(x), 2.5);
  EXPECT_DOUBLE_EQ(sample_variance(x), 5.0 / 3.0);
  EXPECT_NEAR(correlation(x, y), 1.0, 1e-15);
  const auto fit = least_squares_line(x, y);
  EXPECT_NEAR(fit.slope, 2.0, 1e-15);
  EXPECT_NEAR(fit.intercept, 0.0, 1e-14);
}

TEST(Stats, ReferenceCdfs) {
  EXPECT_NEAR(Reference::gaussian(0, 1).cdf(0.0), 0.5, 1e-15);
  EXPECT_NEAR(Reference::rayleigh(2.0).cdf(3.0), oracle::rayleigh_cdf(3.0, 2.0), 1e-15);
  EXPECT_DOUBLE_EQ(Reference::uniform(0, 4).cdf(1.0), 0.25);
  EXPECT_EQ(Reference::parse("rayleigh").kind, Reference::Kind::rayleigh);
  EXPECT_TRUE(Reference::parse("gaussian").needs_estimate());
  EXPECT_THROW(Reference::parse("cauchy"), std::invalid_argument);
}

TEST(Stats, MomentEstimates) {
  const std::vector<double> x{1, 2, 3, 4, 5};
  const auto g = Reference::gaussian().resolved(x);
  EXPECT_DOUBLE_EQ(g.p1, 3.0);
  EXPECT_NEAR(g.p2, std::sqrt(2.5), 1e-15);
  const auto r = Reference::rayleigh().resolved(x);
  EXPECT_NEAR(r.p1, std::sqrt(55.0 / 10.0), 1e-15);  // sigma^2 = E[r^2] / 2
}

TEST(Stats, KolmogorovAndChi2Tails) {
  EXPECT_NEAR(kolmogorov_sf(1.36), 0.0494, 5e-4);
  EXPECT_NEAR(kolmogorov_sf(0.0), 1.0, 1e-15);
  EXPECT_NEAR(chi2_sf(3.841458820694124, 1.0), 0.05, 1e-12);
  EXPECT_NEAR(chi2_sf(2.0, 2.0), std::exp(-1.0), 1e-14);
}

TEST(Stats, GaussianSamplesPassMismatchFails) {
  GaussianSampler g(make_engine(77, {}));
  std::vector<double> v(50000);
  g.fill(v);
  EXPECT_TRUE(ks_test(v, Reference::gaussian(0, 1)).pass);
  EXPECT_TRUE(chi2_test(v, Reference::gaussian()).pass);
  const auto wrong = ks_test(v, Reference::gaussian(0, 1.1));
  EXPECT_LT(wrong.p_value, 1e-6);
  EXPECT_FALSE(wrong.pass);
  EXPECT_EQ(chi2_test(v, Reference::gaussian(), 100).dof, 97);
}

TEST(Stats, Chi2BinsShrinkForSmallSamples) {
  GaussianSampler g(make_engine(78, {}));
  std::vector<double> v(200);
  g.fill(v);
  EXPECT_EQ(chi2_test(v, Reference::gaussian(0, 1), 100).dof, 39);
  EXPECT_THROW(ks_test(std::span(v).first(99), Reference::gaussian(0, 1)), std::invalid_argument);
}

TEST(Stats, Chi2BinMassesMatchNumericalIntegration) {
  // Equal-probability bins: each interval of the N(0,1) partition holds 1/bins.
  const Reference ref = Reference::gaussian(0, 1);
  const double lo = -0.5244005127080407, hi = 0.0;  // quantiles 0.3 and 0.5
  EXPECT_NEAR(ref.cdf(hi) - ref.cdf(lo), 0.2, 1e-12);
  EXPECT_NEAR(oracle::gaussian_mass(lo, hi), 0.2, 1e-12);
}

TEST(Stats, MonobitKnownValue) {
  // n = 100, 60 ones: S = 20, p = erfc(2 / sqrt 2)
  BitBlock b(100);
  for (std::size_t i = 0; i < 60; ++i) b.set(i, true);
  EXPECT_NEAR(monobit_test(b).p_value, std::erfc(20.0 / std::sqrt(200.0)), 1e-14);
}

TEST(Stats, RunsStatisticMatchesNaiveCount) {
  for (std::uint64_t s = 1; s <= 5; ++s) {
    const auto b = random_block(1000 + 37 * s, s);
    oracle::Bits ob(b.size());
    for (std::size_t i = 0; i < b.size(); ++i) ob[i] = b.get(i);
    EXPECT_EQ(runs_test(b).statistic, static_cast<double>(oracle::runs(ob)));
  }
}

TEST(Stats, RunsTestPublishedExample) {
  // SP 800-22 section 2.3.8 example: p = 0.500798
  const auto b = BitBlock::from_string(
      "1100100100001111110110101010001000100001011010001100001000110100110001001100011001100010100010111000");
  EXPECT_NEAR(runs_test(b).p_value, 0.500798, 1e-6);
}

TEST(Stats, BlockFrequencyAndLongestRunPublishedExamples) {
  const auto b = BitBlock::from_string(
      "1100100100001111110110101010001000100001011010001100001000110100110001001100011001100010100010111000");
  EXPECT_NEAR(block_frequency_test(b, 10).p_value, 0.706438, 1e-6);
  const auto lr = BitBlock::from_string(
      "11001100000101010110110001001100111000000000001001001101010100010001001111010110100000001101011111001100"
      "111001101101100010110010");
  const auto r = longest_run_test(lr);
  EXPECT_NEAR(r.statistic, 4.882605, 1e-6);
  EXPECT_NEAR(r.p_value, 0.180609, 1e-4);  // published p is rounded from the same statistic
}

TEST(Stats, BitTestsPassRandomRejectPathologies) {
  const auto good = bit_tests(random_block(1'000'000, 6));
  ASSERT_EQ(good.size(), 4u);
  for (const auto& r : good) EXPECT_TRUE(r.pass) << r.test_name << " " << r.p_value;
  for (bool alternating : {true, false}) {
    const auto bad = bit_tests(pattern(1'000'000, alternating));
    bool rejected = false;
    for (const auto& r : bad) rejected |= r.p_value < 1e-6;
    EXPECT_TRUE(rejected);
  }
  EXPECT_THROW(bit_tests(random_block(1000, 1)), std::invalid_argument);
}
