#pragma once

#include <span>
#include <vector>

namespace triqrng {

struct PsdBin {
  double frequency_hz = 0.0;
  double density = 0.0;  // one-sided, units^2 / Hz
};

/// Welch averaged periodogram: Hann window, 50% overlap, the global mean
/// removed first. Returns segment_length/2 + 1 one-sided bins from DC to
/// Nyquist, scaled so that integrate_psd() equals the sample variance up to
/// window leakage.
///
/// Requires samples.size() >= segment_length >= 8 and a power-of-two segment.
std::vector<PsdBin> psd_estimate(std::span<const double> samples, std::size_t segment_length,
                                 double sample_rate_hz = 1.0);

/// sum(density) * bin width.
double integrate_psd(std::span<const PsdBin> psd);

}  // namespace triqrng
