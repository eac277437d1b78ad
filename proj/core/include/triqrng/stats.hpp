#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "triqrng/bitblock.hpp"

namespace triqrng {

double mean(std::span<const double> x);
/// Unbiased (n - 1) sample variance.
double sample_variance(std::span<const double> x);
/// Pearson correlation of x[t] and y[t + lag].
double correlation(std::span<const double> x, std::span<const double> y, std::size_t lag = 0);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r = 0.0;  // Pearson correlation of x and y
};
LineFit least_squares_line(std::span<const double> x, std::span<const double> y);

struct GofReport {
  std::string test_name;
  double statistic = 0.0;
  double p_value = 0.0;
  double alpha = 0.01;
  bool pass = false;  // p_value >= alpha
  std::size_t n_samples = 0;
  int dof = 0;  // chi-squared degrees of freedom, 0 for other tests
  bool parameters_estimated = false;
};

/// Continuous reference distribution for the GoF tests. Parameters left as
/// NaN are estimated from the sample by the method of moments.
struct Reference {
  enum class Kind { gaussian, rayleigh, uniform };

  Kind kind = Kind::gaussian;
  double p1 = 0.0;  // gaussian mu | rayleigh sigma | uniform a
  double p2 = 1.0;  // gaussian sigma | unused | uniform b

  static Reference gaussian();
  static Reference gaussian(double mu, double sigma);
  static Reference rayleigh();
  static Reference rayleigh(double sigma);
  static Reference uniform();
  static Reference uniform(double a, double b);
  /// "gaussian" | "rayleigh" | "uniform", parameters estimated.
  static Reference parse(const std::string& name);

  bool needs_estimate() const;
  int parameter_count() const { return kind == Kind::rayleigh ? 1 : 2; }
  /// Fills missing parameters from the sample moments.
  Reference resolved(std::span<const double> samples) const;
  /// Requires resolved parameters. A zero scale gives a step CDF.
  double cdf(double x) const;
  std::string name() const;
};

/// Kolmogorov survival function Q(lambda) = 2 sum (-1)^(k-1) exp(-2 k^2 lambda^2).
double kolmogorov_sf(double lambda);
/// Upper tail of the chi-squared distribution.
double chi2_sf(double x, double dof);

/// One-sample KS test with the asymptotic p-value at lambda = sqrt(n) D.
/// Needs at least 100 samples.
GofReport ks_test(std::span<const double> samples, const Reference& ref, double alpha = 0.01);

/// Pearson chi-squared over an equal-probability partition of the reference.
/// The bin count is reduced until every bin expects at least 5 samples;
/// dof = bins - 1 - (estimated parameters).
GofReport chi2_test(std::span<const double> samples, const Reference& ref, std::size_t n_bins = 100,
                    double alpha = 0.01);

/// Chi-squared statistic and p-value from observed counts against equal
/// expected counts; exposed for the histogram tools.
GofReport chi2_from_counts(std::span<const double> observed, std::span<const double> expected, int dof,
                           double alpha = 0.01);

// SP 800-22 tests. Each needs at least 100 bits; bit_tests() needs 10^6.
GofReport monobit_test(const BitBlock& bits, double alpha = 0.01);
GofReport block_frequency_test(const BitBlock& bits, std::size_t block = 128, double alpha = 0.01);
GofReport runs_test(const BitBlock& bits, double alpha = 0.01);
GofReport longest_run_test(const BitBlock& bits, double alpha = 0.01);

inline constexpr std::size_t kBitTestMinBits = 1'000'000;
std::vector<GofReport> bit_tests(const BitBlock& bits, double alpha = 0.01);

}  // namespace triqrng
