#include "triqrng/rayleigh.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "triqrng/savgol.hpp"

namespace triqrng {

std::vector<double> rayleigh_raw(std::span<const double> i_vals, std::span<const double> q_vals) {
  if (i_vals.size() != q_vals.size()) throw std::invalid_argument("I and Q sequences differ in length");
  std::vector<double> r(i_vals.size());
  for (std::size_t t = 0; t < r.size(); ++t) r[t] = std::hypot(i_vals[t], q_vals[t]);
  return r;
}

PhaseResult phase_uniform(std::span<const double> i_vals, std::span<const double> q_vals) {
  if (i_vals.size() != q_vals.size()) throw std::invalid_argument("I and Q sequences differ in length");
  PhaseResult res;
  res.theta.reserve(i_vals.size());
  constexpr double two_pi = 2.0 * std::numbers::pi;
  for (std::size_t t = 0; t < i_vals.size(); ++t) {
    if (i_vals[t] == 0.0 && q_vals[t] == 0.0) {
      ++res.degenerate;
      continue;
    }
    double th = std::atan2(q_vals[t], i_vals[t]);
    if (th < 0.0) th += two_pi;
    if (th >= two_pi) th = 0.0;  // -0 and -tiny round up to 2 pi
    res.theta.push_back(th);
  }
  return res;
}

RayleighHistogram rayleigh_histogram(std::span<const double> r, std::size_t bins, std::size_t window, int order,
                                     double alpha) {
  if (bins < 5) throw std::invalid_argument("histogram needs at least 5 bins");
  if (r.size() < 5 * bins) throw std::invalid_argument("too few samples for the requested bins");
  const Reference ref = Reference::rayleigh().resolved(r);

  RayleighHistogram h;
  h.sigma = ref.p1;
  h.raw_counts.assign(bins, 0.0);
  for (double x : r) {
    const auto b = static_cast<std::size_t>(ref.cdf(x) * static_cast<double>(bins));
    h.raw_counts[std::min(b, bins - 1)] += 1.0;
  }
  h.smoothed_counts = savitzky_golay(h.raw_counts, window, order);
  h.expected = static_cast<double>(r.size()) / static_cast<double>(bins);
  const std::vector<double> expected(bins, h.expected);
  const int dof = static_cast<int>(bins) - 2;
  h.raw_gof = chi2_from_counts(h.raw_counts, expected, dof, alpha);
  h.raw_gof.test_name = "chi2_rayleigh_histogram_raw";
  h.raw_gof.parameters_estimated = true;
  h.smoothed_gof = chi2_from_counts(h.smoothed_counts, expected, dof, alpha);
  h.smoothed_gof.test_name = "chi2_rayleigh_histogram_smoothed";
  h.smoothed_gof.parameters_estimated = true;
  return h;
}

}  // namespace triqrng
