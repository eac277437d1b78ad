#include "triqrng/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "triqrng/errors.hpp"
#include "triqrng/stats.hpp"

namespace triqrng {

namespace {

// log(erfc(x)) without underflow for large x (asymptotic series past 25).
double log_erfc(double x) {
  if (x < 25.0) return std::log(std::erfc(x));
  const double x2 = x * x;
  const double inv = 1.0 / (2.0 * x2);
  const double series = 1.0 - inv + 3.0 * inv * inv - 15.0 * inv * inv * inv;
  return -x2 - std::log(x * std::sqrt(std::numbers::pi)) + std::log(series);
}

// Positive below g*, negative above.
double g_residual(double g, double delta_x, double r) {
  return std::log(std::erf(delta_x / (2.0 * g))) - log_erfc(r / g);
}

}  // namespace

double solve_g_star(double delta_x, double r) {
  if (!(delta_x > 0.0) || !(r > delta_x)) throw std::invalid_argument("solve_g_star needs 0 < delta_x < r");

  double lo = r / 30.0;
  if (!(g_residual(lo, delta_x, r) > 0.0))
    throw SolverError("g* not bracketed: erf term already below erfc term at g = r/30");
  double hi = r;
  int grow = 0;
  while (!(g_residual(hi, delta_x, r) < 0.0)) {
    hi *= 2.0;
    if (++grow > 200) throw SolverError("g* not bracketed: no sign change up to g = 2^200 r");
  }

  for (int it = 0; it < 2000; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (g_residual(mid, delta_x, r) > 0.0)
      lo = mid;
    else
      hi = mid;
  }
  // Return the endpoint with the smaller residual.
  return std::abs(g_residual(lo, delta_x, r)) <= std::abs(g_residual(hi, delta_x, r)) ? lo : hi;
}

double photon_prefactor(double n_photon) {
  if (!(n_photon >= 0.0)) throw std::invalid_argument("photon number must be non-negative");
  const double s = std::sqrt(n_photon) + std::sqrt(1.0 + n_photon);
  return s * s;
}

double min_entropy_iid(double n_photon, double delta_x, double r) {
  const double g = solve_g_star(delta_x, r);
  return -std::log2(photon_prefactor(n_photon) * std::erf(delta_x / (2.0 * g)));
}

double min_entropy_nonlinear(double n_photon, const AdcSpec& spec) {
  spec.validate();
  const double dx = spec.bin_width();
  const double g = solve_g_star(dx, spec.range_v);
  const double widened = dx + spec.dnl_max * dx;
  return -std::log2(photon_prefactor(n_photon) * std::erf(widened / (2.0 * g)));
}

double effective_photon_number(double sigma_m2, double sigma_qc2) {
  if (!(sigma_qc2 > 0.0)) throw std::invalid_argument("conditional variance must be positive");
  if (sigma_m2 < sigma_qc2)
    throw std::invalid_argument("measured variance " + std::to_string(sigma_m2) +
                                " is below the conditional quantum variance " + std::to_string(sigma_qc2));
  return sigma_m2 / (2.0 * sigma_qc2) - 0.5;
}

std::vector<double> autocovariance_from_psd(std::span<const PsdBin> psd, std::size_t max_lag) {
  if (psd.size() < 2) throw std::invalid_argument("PSD needs at least two bins");
  const double df = psd[1].frequency_hz - psd[0].frequency_hz;
  if (!(df > 0.0)) throw std::invalid_argument("PSD bins must be increasing in frequency");
  const double L = 2.0 * static_cast<double>(psd.size() - 1);
  std::vector<double> r(max_lag + 1, 0.0);
  for (std::size_t k = 0; k <= max_lag; ++k) {
    double acc = 0.0;
    for (std::size_t j = 0; j < psd.size(); ++j)
      acc += psd[j].density * std::cos(2.0 * std::numbers::pi * static_cast<double>(j * k) / L);
    r[k] = acc * df;
  }
  return r;
}

std::vector<double> prediction_error_variances(std::span<const double> r, int order) {
  if (order < 0) throw std::invalid_argument("prediction order must be non-negative");
  if (r.size() < static_cast<std::size_t>(order) + 1) throw std::invalid_argument("autocovariance too short");
  if (!(r[0] > 0.0)) throw std::invalid_argument("zero-lag autocovariance must be positive");

  std::vector<double> errors{r[0]};
  std::vector<double> a;  // a[0..p-1], predictor x_t ~ sum a[i] x_{t-1-i}
  double err = r[0];
  for (int p = 1; p <= order; ++p) {
    double acc = r[static_cast<std::size_t>(p)];
    for (int i = 0; i < p - 1; ++i) acc -= a[static_cast<std::size_t>(i)] * r[static_cast<std::size_t>(p - 1 - i)];
    const double k = acc / err;
    if (!(std::abs(k) < 1.0)) throw SolverError("Levinson-Durbin recursion lost positive definiteness");
    std::vector<double> next(static_cast<std::size_t>(p));
    for (int i = 0; i < p - 1; ++i)
      next[static_cast<std::size_t>(i)] = a[static_cast<std::size_t>(i)] - k * a[static_cast<std::size_t>(p - 2 - i)];
    next[static_cast<std::size_t>(p - 1)] = k;
    a = std::move(next);
    err *= 1.0 - k * k;
    errors.push_back(err);
  }
  return errors;
}

double conditional_variance(std::span<const PsdBin> psd, int order) {
  if (order < 0) throw std::invalid_argument("prediction order must be non-negative");
  for (const auto& b : psd)
    if (!(b.density > 0.0))
      throw std::invalid_argument("PSD has a non-positive bin at " + std::to_string(b.frequency_hz) + " Hz");
  const auto r = autocovariance_from_psd(psd, static_cast<std::size_t>(order));
  return prediction_error_variances(r, order).back();
}

std::size_t extractable_length(std::size_t n_bits, double h_min_per_bit, double epsilon) {
  if (n_bits == 0) throw std::invalid_argument("n_bits must be positive");
  if (!(h_min_per_bit > 0.0 && h_min_per_bit <= 1.0)) throw std::invalid_argument("h_min_per_bit must be in (0, 1]");
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw std::invalid_argument("epsilon must be in (0, 1)");
  const double penalty = -std::log2(2.0 * epsilon * epsilon);
  const double l = std::floor(static_cast<double>(n_bits) * h_min_per_bit - penalty);
  return l > 0.0 ? static_cast<std::size_t>(l) : 0;
}

EntropyReport certify_channel(std::span<const double> measured_v, std::span<const double> dark_v,
                              const AdcSpec& spec, const CertifyOptions& options) {
  spec.validate();
  if (measured_v.size() < options.psd_segment) throw std::invalid_argument("measured record shorter than one PSD segment");

  auto psd = psd_estimate(measured_v, options.psd_segment, options.sample_rate_hz);
  if (!dark_v.empty()) {
    const auto dark = psd_estimate(dark_v, options.psd_segment, options.sample_rate_hz);
    for (std::size_t j = 0; j < psd.size(); ++j) psd[j].density -= dark[j].density;
  }

  EntropyReport rep;
  rep.sigma_m2 = sample_variance(measured_v);
  // The innovation variance cannot exceed the total variance; an estimate
  // above it is sampling noise, and capping it only raises n_eff.
  rep.sigma_qc2 = std::min(conditional_variance(psd, options.prediction_order), rep.sigma_m2);
  rep.n_eff = effective_photon_number(rep.sigma_m2, rep.sigma_qc2);
  rep.delta_x = spec.bin_width();
  rep.range_v = spec.range_v;
  rep.dnl_max = spec.dnl_max;
  rep.adc_bits = spec.bits;
  rep.g_star = solve_g_star(rep.delta_x, spec.range_v);
  rep.h_min_per_sample = std::max(0.0, min_entropy_nonlinear(rep.n_eff, spec));
  rep.h_min_per_bit = rep.h_min_per_sample / spec.bits;
  rep.epsilon = options.epsilon;
  rep.block_n = options.block_n;
  rep.extractable_bits =
      rep.h_min_per_bit > 0.0 ? extractable_length(options.block_n, std::min(rep.h_min_per_bit, 1.0), options.epsilon) : 0;
  rep.extractable_fraction = static_cast<double>(rep.extractable_bits) / static_cast<double>(options.block_n);
  rep.prediction_order = options.prediction_order;
  rep.psd_segment = options.psd_segment;
  rep.samples = measured_v.size();
  return rep;
}

EntropyReport certify_channel(const CodeBlock& measured, const CodeBlock& dark, const CertifyOptions& options) {
  const auto m = dequantize(measured);
  const auto d = dark.codes.empty() ? std::vector<double>{} : dequantize(dark);
  return certify_channel(m, d, measured.spec, options);
}

}  // namespace triqrng
