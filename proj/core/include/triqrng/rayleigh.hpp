#pragma once

#include <span>
#include <vector>

#include "triqrng/stats.hpp"

namespace triqrng {

/// Quality label attached to every Rayleigh output: no extractor backs it.
inline constexpr const char* kRayleighQuality = "denoised-raw, uncertified";

/// r = sqrt(I^2 + Q^2) element-wise.
std::vector<double> rayleigh_raw(std::span<const double> i_vals, std::span<const double> q_vals);

struct PhaseResult {
  std::vector<double> theta;  // [0, 2 pi)
  std::size_t degenerate = 0;  // I = Q = 0 pairs, skipped
};

PhaseResult phase_uniform(std::span<const double> i_vals, std::span<const double> q_vals);

/// Histogram-mode smoothing: counts over `bins` equal-probability bins of the
/// moment-matched Rayleigh, Savitzky-Golay over the count sequence, and a
/// chi-squared test (dof = bins - 2) before and after smoothing.
struct RayleighHistogram {
  double sigma = 0.0;
  std::vector<double> raw_counts;
  std::vector<double> smoothed_counts;
  double expected = 0.0;  // per bin
  GofReport raw_gof;
  GofReport smoothed_gof;
};

RayleighHistogram rayleigh_histogram(std::span<const double> r, std::size_t bins = 100, std::size_t window = 31,
                                     int order = 3, double alpha = 0.05);

}  // namespace triqrng
