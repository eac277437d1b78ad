#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "triqrng/random.hpp"

namespace triqrng {

inline constexpr double kDefaultSampleRateHz = 2.0e9;

/// Statistical description of the simulated dual-quadrature homodyne chain.
///
/// Each channel is
///
///     x[t] = clip( sum_k taps[k] * w[t-k] ) + e[t],   w ~ N(0, sigma_q2), e ~ N(0, sigma_e2)
///
/// where clip is the optional soft saturation v -> Vsat * tanh(v / Vsat) of the
/// detected shot-noise signal. Electronic excess noise is added after the
/// clip, so a dark record (LO blocked) contains exactly the e[t] term.
struct NoiseModel {
  double sigma_q2 = 1.0;                 // V^2 at lo_power_mw
  double sigma_e2 = 0.0;                 // V^2, both channels unless sigma_e2_q is set
  std::optional<double> sigma_e2_q;      // Q-channel excess override
  std::vector<double> filter_taps{1.0};  // sum of squares == 1
  double lo_power_mw = 1.0;
  double responsivity = 1.0;             // V^2 of quantum variance per mW
  double saturation_v = 0.0;             // soft-clip level, 0 disables

  /// Throws std::invalid_argument on a broken invariant. With allow_dark the
  /// quantum variance may be zero (LO blocked), as used by sweeps and dark
  /// calibration records.
  void validate(bool allow_dark = false) const;

  /// Same detector with the LO set to `mw`; sigma_q2 follows the linear
  /// shot-noise slope.
  NoiseModel at_lo_power(double mw) const;

  double excess_variance(int channel) const {
    return channel == 1 && sigma_e2_q ? *sigma_e2_q : sigma_e2;
  }

  /// Tuned stand-in for the published operating point: 4.13 mW per diode,
  /// 8-tap detector response, detector just saturating.
  static NoiseModel paper_like();
  /// paper_like() with the electronic excess noise removed.
  static NoiseModel quiet();
};

/// Rescales taps to unit energy. Throws if all taps are zero.
std::vector<double> normalize_taps(std::vector<double> taps);

/// Geometric low-pass FIR, taps[k] proportional to decay^k, unit energy.
std::vector<double> geometric_taps(std::size_t count, double decay);

struct QuadratureFrame {
  std::vector<double> i;
  std::vector<double> q;
  double sample_rate_hz = kDefaultSampleRateHz;

  std::size_t size() const { return i.size(); }
};

/// Streaming generator for the I/Q records. Filter history carries across
/// calls, so next(a) followed by next(b) equals next(a + b) sample for sample.
/// A single instance is not thread-safe; independent instances are.
class QuadratureSource {
 public:
  QuadratureSource(const NoiseModel& model, std::uint64_t seed, std::uint32_t stream = 0,
                   double sample_rate_hz = kDefaultSampleRateHz, bool allow_dark = false);

  QuadratureFrame next(std::size_t count);
  void next_into(std::span<double> i, std::span<double> q);

  const NoiseModel& model() const { return model_; }
  double sample_rate_hz() const { return sample_rate_hz_; }

 private:
  struct Channel {
    GaussianSampler quantum;
    GaussianSampler excess;
    std::vector<double> history;  // last taps-1 white quantum samples
    double sigma_e = 0.0;
  };

  void generate(Channel& ch, std::span<double> out);

  NoiseModel model_;
  double sample_rate_hz_;
  double sigma_q_;
  Channel i_;
  Channel q_;
  std::vector<double> scratch_;
};

QuadratureFrame simulate_quadratures(const NoiseModel& model, std::size_t count, std::uint64_t seed);

/// Excess-noise-only record: the same chain with the LO blocked.
QuadratureFrame simulate_dark(const NoiseModel& model, std::size_t count, std::uint64_t seed);

struct SweepPoint {
  double power_mw = 0.0;
  double total_variance = 0.0;   // LO on
  double excess_variance = 0.0;  // LO blocked
  double quantum_variance() const { return total_variance - excess_variance; }
};

/// Reproduces the shot-noise-limit check: for each LO power, measured
/// variance with and without the LO (averaged over both channels).
std::vector<SweepPoint> lo_power_sweep(const NoiseModel& model, std::span<const double> powers_mw,
                                       std::size_t samples_per_point, std::uint64_t seed);

/// Interleaved I,Q little-endian float32.
void write_frame_f32(const std::filesystem::path& path, const QuadratureFrame& frame);
/// Columns index,I,Q with a header row.
void write_frame_csv(const std::filesystem::path& path, const QuadratureFrame& frame);
QuadratureFrame read_frame_f32(const std::filesystem::path& path, double sample_rate_hz = kDefaultSampleRateHz);

}  // namespace triqrng
