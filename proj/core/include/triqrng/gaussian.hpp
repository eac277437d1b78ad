#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "triqrng/adc.hpp"
#include "triqrng/entropy.hpp"
#include "triqrng/stats.hpp"

namespace triqrng {

/// Orthogonal k x k matrix applied to each group of a Wallace pass.
class RecursiveMatrix {
 public:
  /// Row-major entries; throws unless square and M^T M = I within 1e-12.
  RecursiveMatrix(std::size_t k, std::vector<double> entries);

  /// Sylvester Hadamard scaled by 1/sqrt(k); k a power of two.
  static RecursiveMatrix hadamard(std::size_t k = 4);
  static RecursiveMatrix identity(std::size_t k);

  std::size_t k() const { return k_; }
  double operator()(std::size_t row, std::size_t col) const { return entries_[row * k_ + col]; }
  const std::vector<double>& entries() const { return entries_; }

 private:
  std::size_t k_;
  std::vector<double> entries_;
};

/// N = k * l real values viewed as a k x l row-major array.
struct GaussianPool {
  std::vector<double> values;
  std::size_t k = 4;
  std::size_t l = 0;
  int pass_count = 0;

  double mean_square() const;
};

/// Arithmetic right shift by (bits - m_bits); keeps the sign.
std::vector<std::int32_t> msb_truncate(std::span<const std::int32_t> codes, int bits, int m_bits);
std::vector<std::int32_t> msb_truncate(const CodeBlock& codes, int m_bits);

/// floor(h_min_per_bit * adc_bits), at least 1.
int choose_msb_bits(double h_min_per_bit, int adc_bits);

/// Scales values to unit mean square. Throws on an all-zero pool or when the
/// size is not a multiple of k.
GaussianPool normalize_pool(std::vector<double> values, std::size_t k = 4);

/// One mixing pass: column c of the k x l array (v[c], v[c+l], ...) is
/// multiplied by the matrix and written back transposed to v[c*k .. c*k+k-1];
/// then the global sum of squares is restored to its pre-pass value.
void wallace_pass(GaussianPool& pool, const RecursiveMatrix& matrix);

/// Round-to-nearest onto a symmetric n_out-bit grid spanning +-grid_sigma.
class Requantizer {
 public:
  Requantizer(int n_out, double grid_sigma = 5.0);

  std::int32_t code(double v) const;
  double value(std::int32_t code) const { return static_cast<double>(code) * step_; }
  int bits() const { return n_out_; }
  double step() const { return step_; }
  std::int32_t max_code() const { return max_code_; }

 private:
  int n_out_;
  double step_;
  std::int32_t max_code_;
};

struct GaussianOptions {
  std::size_t k = 4;
  std::size_t pool_size = 65536;
  int passes_i = 5;
  int passes_q = 4;
  bool auto_passes = false;  // stop each pool once KS and chi2 both pass
  int max_auto_passes = 16;
  std::vector<double> matrix;  // row-major k x k; empty selects the scaled Hadamard
  double output_grid_sigma = 5.0;
  double alpha = 0.01;
  std::size_t chi2_bins = 100;

  RecursiveMatrix recursive_matrix() const;
};

struct GaussianChannelResult {
  std::vector<std::int32_t> codes;  // signed n_out-bit fixed point
  int m_bits = 0;
  int n_out = 0;
  int passes = 0;  // largest pass count used by any pool
  std::size_t pools = 0;
  double step = 0.0;  // value of one output LSB in standard deviations
  GofReport ks;
  GofReport chi2;

  std::vector<double> values() const;
};

/// Runs the full chain on one channel: msb_truncate, then for each complete
/// pool (in time order) normalize, `passes` Wallace passes, requantize to
/// m_bits + k - 1 bits. Samples past the last complete pool are dropped.
GaussianChannelResult extract_gaussian_channel(const CodeBlock& codes, int m_bits, int passes,
                                               const GaussianOptions& options = {});

/// GoF of a finished value set against a moment-matched Gaussian.
std::pair<GofReport, GofReport> gaussian_gof(std::span<const double> values, double alpha = 0.01,
                                             std::size_t chi2_bins = 100);

struct GaussianExtraction {
  GaussianChannelResult i;
  GaussianChannelResult q;
};

/// Both channels with m_bits chosen from the report.
GaussianExtraction gaussian_extract(const CodeBlock& codes_i, const CodeBlock& codes_q, const EntropyReport& report,
                                    int passes_i, int passes_q, const GaussianOptions& options = {});

}  // namespace triqrng
