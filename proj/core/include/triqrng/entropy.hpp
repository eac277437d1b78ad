#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "triqrng/adc.hpp"
#include "triqrng/spectrum.hpp"

namespace triqrng {

inline constexpr double kDefaultEpsilon = 0x1p-32;

/// Certified min-entropy of one digitized channel plus the quantities it was
/// derived from. JSON field names match the member names.
struct EntropyReport {
  std::string channel;
  double h_min_per_sample = 0.0;  // bits
  double h_min_per_bit = 0.0;     // h_min_per_sample / adc_bits
  double g_star = 0.0;            // V
  double n_eff = 0.0;
  double sigma_m2 = 0.0;   // measured variance, V^2
  double sigma_qc2 = 0.0;  // conditional quantum variance, V^2
  double epsilon = kDefaultEpsilon;
  double extractable_fraction = 0.0;  // extractable_length(block_n) / block_n
  std::size_t block_n = 0;
  std::size_t extractable_bits = 0;
  int adc_bits = 0;
  double range_v = 0.0;
  double delta_x = 0.0;
  double dnl_max = 0.0;
  int prediction_order = 0;
  std::size_t psd_segment = 0;
  std::size_t samples = 0;
};

/// Solves erf(delta_x / (2g)) = erfc(r / g) for g by bisection in log space.
/// Requires 0 < delta_x < r; throws SolverError if the root cannot be bracketed.
double solve_g_star(double delta_x, double r);

/// (sqrt(n) + sqrt(1 + n))^2, the thermal-photon prefactor of the bound.
double photon_prefactor(double n_photon);

/// -log2[ prefactor(n) * erf(delta_x / (2 g*)) ].
double min_entropy_iid(double n_photon, double delta_x, double r);

/// Same bound with the worst-case bin (1 + dnl_max) * delta_x in the erf;
/// g* is still solved with the ideal bin width. R is spec.range_v.
double min_entropy_nonlinear(double n_photon, const AdcSpec& spec);

/// sigma_m2 / (2 sigma_qc2) - 1/2. Requires sigma_m2 >= sigma_qc2 > 0.
double effective_photon_number(double sigma_m2, double sigma_qc2);

/// Autocovariance r(0..max_lag) of the process with one-sided PSD `psd`
/// (bins from DC to Nyquist, equally spaced).
std::vector<double> autocovariance_from_psd(std::span<const PsdBin> psd, std::size_t max_lag);

/// Levinson-Durbin on autocovariance r; element p of the result is the
/// one-step prediction error variance at order p (element 0 is r[0]).
std::vector<double> prediction_error_variances(std::span<const double> r, int order);

/// One-step prediction error variance of the Gaussian process with this
/// spectrum at the given order. Every bin must be strictly positive.
double conditional_variance(std::span<const PsdBin> psd, int order);

/// floor(n_bits * h - log2(1 / (2 eps^2))), clamped at 0.
std::size_t extractable_length(std::size_t n_bits, double h_min_per_bit, double epsilon);

struct CertifyOptions {
  int prediction_order = 16;
  std::size_t psd_segment = 128;
  double epsilon = kDefaultEpsilon;
  std::size_t block_n = 1536;
  double sample_rate_hz = kDefaultSampleRateHz;
};

/// Certifies one channel from its measured record and a dark record taken
/// with the LO blocked (both in volts, typically dequantized codes). The
/// quantum spectrum is Welch(measured) - Welch(dark); pass an empty dark
/// record to treat the whole measured spectrum as quantum.
EntropyReport certify_channel(std::span<const double> measured_v, std::span<const double> dark_v,
                              const AdcSpec& spec, const CertifyOptions& options = {});

EntropyReport certify_channel(const CodeBlock& measured, const CodeBlock& dark, const CertifyOptions& options = {});

}  // namespace triqrng
