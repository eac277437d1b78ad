#include "triqrng/gaussian.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>
#include <string>
#include <tuple>

namespace triqrng {

RecursiveMatrix::RecursiveMatrix(std::size_t k, std::vector<double> entries) : k_(k), entries_(std::move(entries)) {
  if (k_ < 2) throw std::invalid_argument("recursive matrix must be at least 2x2");
  if (entries_.size() != k_ * k_)
    throw std::invalid_argument("recursive matrix needs " + std::to_string(k_ * k_) + " entries, got " +
                                std::to_string(entries_.size()));
  for (std::size_t a = 0; a < k_; ++a) {
    for (std::size_t b = 0; b < k_; ++b) {
      double dot = 0.0;
      for (std::size_t r = 0; r < k_; ++r) dot += (*this)(r, a) * (*this)(r, b);
      if (std::abs(dot - (a == b ? 1.0 : 0.0)) > 1e-12) throw std::invalid_argument("recursive matrix is not orthogonal");
    }
  }
}

RecursiveMatrix RecursiveMatrix::hadamard(std::size_t k) {
  if (k < 2 || !std::has_single_bit(k)) throw std::invalid_argument("Hadamard size must be a power of two >= 2");
  std::vector<double> h(k * k);
  const double scale = 1.0 / std::sqrt(static_cast<double>(k));
  for (std::size_t r = 0; r < k; ++r)
    for (std::size_t c = 0; c < k; ++c) h[r * k + c] = (std::popcount(r & c) % 2 == 0 ? scale : -scale);
  return RecursiveMatrix(k, std::move(h));
}

RecursiveMatrix RecursiveMatrix::identity(std::size_t k) {
  std::vector<double> m(k * k, 0.0);
  for (std::size_t r = 0; r < k; ++r) m[r * k + r] = 1.0;
  return RecursiveMatrix(k, std::move(m));
}

double GaussianPool::mean_square() const {
  if (values.empty()) return 0.0;
  double s = 0.0;
  for (double v : values) s += v * v;
  return s / static_cast<double>(values.size());
}

std::vector<std::int32_t> msb_truncate(std::span<const std::int32_t> codes, int bits, int m_bits) {
  if (m_bits < 1 || m_bits > bits) throw std::invalid_argument("m_bits must be in [1, bits]");
  const int shift = bits - m_bits;
  std::vector<std::int32_t> out(codes.size());
  for (std::size_t t = 0; t < codes.size(); ++t) out[t] = codes[t] >> shift;  // arithmetic in C++20
  return out;
}

std::vector<std::int32_t> msb_truncate(const CodeBlock& codes, int m_bits) {
  return msb_truncate(codes.codes, codes.spec.bits, m_bits);
}

int choose_msb_bits(double h_min_per_bit, int adc_bits) {
  if (!(h_min_per_bit > 0.0 && h_min_per_bit <= 1.0)) throw std::invalid_argument("h_min_per_bit must be in (0, 1]");
  return std::max(1, static_cast<int>(std::floor(h_min_per_bit * adc_bits)));
}

GaussianPool normalize_pool(std::vector<double> values, std::size_t k) {
  if (k == 0 || values.empty() || values.size() % k != 0)
    throw std::invalid_argument("pool size must be a positive multiple of k");
  GaussianPool pool;
  pool.k = k;
  pool.l = values.size() / k;
  pool.values = std::move(values);
  const double ms = pool.mean_square();
  if (!(ms > 0.0)) throw std::invalid_argument("cannot normalize an all-zero pool");
  const double scale = 1.0 / std::sqrt(ms);
  for (double& v : pool.values) v *= scale;
  return pool;
}

void wallace_pass(GaussianPool& pool, const RecursiveMatrix& matrix) {
  const std::size_t k = pool.k, l = pool.l;
  if (matrix.k() != k) throw std::invalid_argument("matrix size does not match the pool group size");
  if (pool.values.size() != k * l) throw std::invalid_argument("pool size is not k * l");

  double before = 0.0;
  for (double v : pool.values) before += v * v;

  std::vector<double> out(pool.values.size());
  std::vector<double> group(k);
  for (std::size_t c = 0; c < l; ++c) {
    for (std::size_t r = 0; r < k; ++r) group[r] = pool.values[r * l + c];
    for (std::size_t r = 0; r < k; ++r) {
      double acc = 0.0;
      for (std::size_t j = 0; j < k; ++j) acc += matrix(r, j) * group[j];
      out[c * k + r] = acc;
    }
  }

  double after = 0.0;
  for (double v : out) after += v * v;
  if (after > 0.0) {
    const double scale = std::sqrt(before / after);
    for (double& v : out) v *= scale;
  }
  pool.values = std::move(out);
  ++pool.pass_count;
}

Requantizer::Requantizer(int n_out, double grid_sigma) : n_out_(n_out) {
  if (n_out < 2 || n_out > 31) throw std::invalid_argument("output precision must be in [2, 31] bits");
  if (!(grid_sigma > 0.0)) throw std::invalid_argument("output grid span must be positive");
  max_code_ = static_cast<std::int32_t>((std::int64_t{1} << (n_out - 1)) - 1);
  step_ = grid_sigma / std::ldexp(1.0, n_out - 1);
}

std::int32_t Requantizer::code(double v) const {
  const double c = std::nearbyint(v / step_);
  const double lim = static_cast<double>(max_code_);
  return static_cast<std::int32_t>(std::clamp(c, -lim, lim));
}

RecursiveMatrix GaussianOptions::recursive_matrix() const {
  if (matrix.empty()) return RecursiveMatrix::hadamard(k);
  return RecursiveMatrix(k, matrix);
}

std::vector<double> GaussianChannelResult::values() const {
  std::vector<double> v(codes.size());
  for (std::size_t t = 0; t < codes.size(); ++t) v[t] = static_cast<double>(codes[t]) * step;
  return v;
}

std::pair<GofReport, GofReport> gaussian_gof(std::span<const double> values, double alpha, std::size_t chi2_bins) {
  return {ks_test(values, Reference::gaussian(), alpha), chi2_test(values, Reference::gaussian(), chi2_bins, alpha)};
}

GaussianChannelResult extract_gaussian_channel(const CodeBlock& codes, int m_bits, int passes,
                                               const GaussianOptions& options) {
  if (passes < 1 && !options.auto_passes) throw std::invalid_argument("at least one Wallace pass is required");
  if (options.pool_size == 0 || options.pool_size % options.k != 0)
    throw std::invalid_argument("pool_size must be a positive multiple of k");
  const std::size_t pools = codes.size() / options.pool_size;
  if (pools == 0)
    throw std::invalid_argument("need at least one full pool of " + std::to_string(options.pool_size) + " samples");

  const auto matrix = options.recursive_matrix();
  const auto truncated = msb_truncate(codes, m_bits);

  GaussianChannelResult res;
  res.m_bits = m_bits;
  res.n_out = m_bits + static_cast<int>(options.k) - 1;
  const Requantizer rq(res.n_out, options.output_grid_sigma);
  res.step = rq.step();
  res.pools = pools;
  res.codes.reserve(pools * options.pool_size);

  for (std::size_t p = 0; p < pools; ++p) {
    std::vector<double> raw(options.pool_size);
    for (std::size_t t = 0; t < raw.size(); ++t) raw[t] = truncated[p * options.pool_size + t];
    auto pool = normalize_pool(std::move(raw), options.k);
    if (options.auto_passes) {
      while (pool.pass_count < options.max_auto_passes) {
        wallace_pass(pool, matrix);
        const auto [ks, chi] = gaussian_gof(pool.values, options.alpha, options.chi2_bins);
        if (ks.pass && chi.pass) break;
      }
    } else {
      for (int k = 0; k < passes; ++k) wallace_pass(pool, matrix);
    }
    res.passes = std::max(res.passes, pool.pass_count);
    for (double v : pool.values) res.codes.push_back(rq.code(v));
  }

  const auto values = res.values();
  std::tie(res.ks, res.chi2) = gaussian_gof(values, options.alpha, options.chi2_bins);
  return res;
}

GaussianExtraction gaussian_extract(const CodeBlock& codes_i, const CodeBlock& codes_q, const EntropyReport& report,
                                    int passes_i, int passes_q, const GaussianOptions& options) {
  if (codes_i.spec.bits != codes_q.spec.bits) throw std::invalid_argument("I and Q code widths differ");
  const int m_bits = choose_msb_bits(std::min(report.h_min_per_bit, 1.0), codes_i.spec.bits);
  return {extract_gaussian_channel(codes_i, m_bits, passes_i, options),
          extract_gaussian_channel(codes_q, m_bits, passes_q, options)};
}

}  // namespace triqrng
