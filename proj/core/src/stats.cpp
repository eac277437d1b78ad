#include "triqrng/stats.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace triqrng {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

GofReport make_report(std::string name, double statistic, double p, double alpha, std::size_t n) {
  GofReport r;
  r.test_name = std::move(name);
  r.statistic = statistic;
  r.p_value = std::clamp(p, 0.0, 1.0);
  r.alpha = alpha;
  r.pass = r.p_value >= alpha;
  r.n_samples = n;
  return r;
}

double igamc(double a, double x) {
  if (x <= 0.0) return 1.0;
  return boost::math::gamma_q(a, x);
}

}  // namespace

double mean(std::span<const double> x) {
  if (x.empty()) throw std::invalid_argument("mean of an empty sequence");
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double sample_variance(std::span<const double> x) {
  if (x.size() < 2) throw std::invalid_argument("variance needs at least two samples");
  const double mu = mean(x);
  double ss = 0.0;
  for (double v : x) ss += (v - mu) * (v - mu);
  return ss / static_cast<double>(x.size() - 1);
}

double correlation(std::span<const double> x, std::span<const double> y, std::size_t lag) {
  if (x.size() != y.size()) throw std::invalid_argument("correlation operands differ in length");
  if (x.size() < lag + 2) throw std::invalid_argument("sequence too short for lag");
  const std::size_t n = x.size() - lag;
  const auto xs = x.subspan(0, n);
  const auto ys = y.subspan(lag, n);
  const double mx = mean(xs), my = mean(ys);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    const double dx = xs[t] - mx, dy = ys[t] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  return sxy / std::sqrt(sxx * syy);
}

LineFit least_squares_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("line fit needs two equal-length series");
  const double mx = mean(x), my = mean(y);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t t = 0; t < x.size(); ++t) {
    sxy += (x[t] - mx) * (y[t] - my);
    sxx += (x[t] - mx) * (x[t] - mx);
    syy += (y[t] - my) * (y[t] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("line fit needs at least two distinct x values");
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r = syy == 0.0 ? 0.0 : sxy / std::sqrt(sxx * syy);
  return f;
}

Reference Reference::gaussian() { return {Kind::gaussian, kNaN, kNaN}; }
Reference Reference::gaussian(double mu, double sigma) { return {Kind::gaussian, mu, sigma}; }
Reference Reference::rayleigh() { return {Kind::rayleigh, kNaN, 0.0}; }
Reference Reference::rayleigh(double sigma) { return {Kind::rayleigh, sigma, 0.0}; }
Reference Reference::uniform() { return {Kind::uniform, kNaN, kNaN}; }
Reference Reference::uniform(double a, double b) { return {Kind::uniform, a, b}; }

Reference Reference::parse(const std::string& name) {
  if (name == "gaussian") return gaussian();
  if (name == "rayleigh") return rayleigh();
  if (name == "uniform") return uniform();
  throw std::invalid_argument("unknown reference distribution '" + name + "'");
}

bool Reference::needs_estimate() const {
  return std::isnan(p1) || (kind != Kind::rayleigh && std::isnan(p2));
}

Reference Reference::resolved(std::span<const double> samples) const {
  if (!needs_estimate()) return *this;
  Reference r = *this;
  switch (kind) {
    case Kind::gaussian: {
      const double mu = mean(samples);
      if (std::isnan(r.p1)) r.p1 = mu;
      if (std::isnan(r.p2)) r.p2 = std::sqrt(sample_variance(samples));
      break;
    }
    case Kind::rayleigh: {
      double s2 = 0.0;
      for (double v : samples) s2 += v * v;
      r.p1 = std::sqrt(s2 / (2.0 * static_cast<double>(samples.size())));
      break;
    }
    case Kind::uniform: {
      const double mu = mean(samples);
      const double half = std::sqrt(3.0 * sample_variance(samples));
      if (std::isnan(r.p1)) r.p1 = mu - half;
      if (std::isnan(r.p2)) r.p2 = mu + half;
      break;
    }
  }
  return r;
}

double Reference::cdf(double x) const {
  switch (kind) {
    case Kind::gaussian:
      if (p2 <= 0.0) return x < p1 ? 0.0 : 1.0;
      return 0.5 * std::erfc(-(x - p1) / (p2 * std::numbers::sqrt2));
    case Kind::rayleigh:
      if (x <= 0.0) return 0.0;
      if (p1 <= 0.0) return 1.0;
      return -std::expm1(-x * x / (2.0 * p1 * p1));
    case Kind::uniform:
      if (p2 <= p1) return x < p1 ? 0.0 : 1.0;
      return std::clamp((x - p1) / (p2 - p1), 0.0, 1.0);
  }
  return kNaN;
}

std::string Reference::name() const {
  switch (kind) {
    case Kind::gaussian: return "gaussian";
    case Kind::rayleigh: return "rayleigh";
    case Kind::uniform: return "uniform";
  }
  return "unknown";
}

double kolmogorov_sf(double lambda) {
  if (!(lambda > 0.0)) return 1.0;
  if (lambda < 1.18) {
    // Jacobi theta form converges fast for small lambda.
    const double pi2 = std::numbers::pi * std::numbers::pi;
    double sum = 0.0;
    for (int k = 1; k <= 50; ++k) {
      const double j = 2.0 * k - 1.0;
      const double term = std::exp(-j * j * pi2 / (8.0 * lambda * lambda));
      sum += term;
      if (term < 1e-300) break;
    }
    return std::clamp(1.0 - std::sqrt(2.0 * std::numbers::pi) / lambda * sum, 0.0, 1.0);
  }
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += (k % 2 == 1 ? term : -term);
    if (term < 1e-300) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

double chi2_sf(double x, double dof) {
  if (!(dof > 0.0)) throw std::invalid_argument("chi-squared dof must be positive");
  return igamc(dof / 2.0, x / 2.0);
}

GofReport ks_test(std::span<const double> samples, const Reference& ref, double alpha) {
  if (samples.size() < 100) throw std::invalid_argument("KS test needs at least 100 samples");
  const Reference r = ref.resolved(samples);
  std::vector<double> s(samples.begin(), samples.end());
  std::sort(s.begin(), s.end());
  const double n = static_cast<double>(s.size());
  double d = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double f = r.cdf(s[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  auto rep = make_report("ks_" + r.name(), d, kolmogorov_sf(std::sqrt(n) * d), alpha, s.size());
  rep.parameters_estimated = ref.needs_estimate();
  return rep;
}

GofReport chi2_from_counts(std::span<const double> observed, std::span<const double> expected, int dof,
                           double alpha) {
  if (observed.size() != expected.size()) throw std::invalid_argument("count vectors differ in length");
  if (dof < 1) throw std::invalid_argument("chi-squared needs at least one degree of freedom");
  double stat = 0.0, total = 0.0;
  for (std::size_t b = 0; b < observed.size(); ++b) {
    if (!(expected[b] > 0.0)) throw std::invalid_argument("bin with zero expected mass");
    const double diff = observed[b] - expected[b];
    stat += diff * diff / expected[b];
    total += observed[b];
  }
  auto rep = make_report("chi2", stat, chi2_sf(stat, dof), alpha, static_cast<std::size_t>(std::llround(total)));
  rep.dof = dof;
  return rep;
}

GofReport chi2_test(std::span<const double> samples, const Reference& ref, std::size_t n_bins, double alpha) {
  if (n_bins < 5) throw std::invalid_argument("chi-squared test needs at least 5 bins");
  const std::size_t bins = std::min(n_bins, samples.size() / 5);
  if (bins < 5) throw std::invalid_argument("too few samples for 5 bins of expected count >= 5");
  const Reference r = ref.resolved(samples);
  const int fitted = ref.needs_estimate() ? r.parameter_count() : 0;
  const int dof = static_cast<int>(bins) - 1 - fitted;
  if (dof < 1) throw std::invalid_argument("no degrees of freedom left after parameter estimation");

  // Equal-probability bins: bin index is floor(F(x) * bins).
  std::vector<double> observed(bins, 0.0);
  for (double x : samples) {
    const auto b = static_cast<std::size_t>(r.cdf(x) * static_cast<double>(bins));
    observed[std::min(b, bins - 1)] += 1.0;
  }
  const std::vector<double> expected(bins, static_cast<double>(samples.size()) / static_cast<double>(bins));
  auto rep = chi2_from_counts(observed, expected, dof, alpha);
  rep.test_name = "chi2_" + r.name();
  rep.parameters_estimated = fitted > 0;
  return rep;
}

GofReport monobit_test(const BitBlock& bits, double alpha) {
  const std::size_t n = bits.size();
  if (n < 100) throw std::invalid_argument("monobit test needs at least 100 bits");
  const double ones = static_cast<double>(bits.popcount());
  const double s = 2.0 * ones - static_cast<double>(n);
  const double s_obs = std::abs(s) / std::sqrt(static_cast<double>(n));
  return make_report("monobit", s_obs, std::erfc(s_obs / std::numbers::sqrt2), alpha, n);
}

GofReport block_frequency_test(const BitBlock& bits, std::size_t block, double alpha) {
  const std::size_t n = bits.size();
  if (n < 100) throw std::invalid_argument("block frequency test needs at least 100 bits");
  if (block < 2 || block > n) throw std::invalid_argument("block frequency block size out of range");
  const std::size_t blocks = n / block;
  double chi = 0.0;
  for (std::size_t b = 0; b < blocks; ++b) {
    const double ones = static_cast<double>(bits.slice(b * block, block).popcount());
    const double pi = ones / static_cast<double>(block) - 0.5;
    chi += pi * pi;
  }
  chi *= 4.0 * static_cast<double>(block);
  return make_report("block_frequency", chi, igamc(static_cast<double>(blocks) / 2.0, chi / 2.0), alpha, n);
}

GofReport runs_test(const BitBlock& bits, double alpha) {
  const std::size_t n = bits.size();
  if (n < 100) throw std::invalid_argument("runs test needs at least 100 bits");
  const double nd = static_cast<double>(n);
  const double pi = static_cast<double>(bits.popcount()) / nd;
  // Frequency prerequisite: the runs statistic is meaningless on biased input.
  if (std::abs(pi - 0.5) >= 2.0 / std::sqrt(nd)) return make_report("runs", 0.0, 0.0, alpha, n);
  std::size_t v = 1;
  const auto words = bits.words();
  for (std::size_t w = 0; w < words.size(); ++w) {
    // Transitions between bit i and bit i+1 inside the word and across words.
    std::uint64_t x = words[w] ^ (words[w] >> 1);
    std::size_t valid = std::min<std::size_t>(63, n - 1 - std::min(n - 1, w * 64));
    x &= (std::uint64_t{1} << valid) - 1;
    v += static_cast<std::size_t>(std::popcount(x));
    if (w + 1 < words.size() && (w + 1) * 64 < n) v += ((words[w] >> 63) ^ (words[w + 1] & 1U)) & 1U;
  }
  const double vd = static_cast<double>(v);
  const double p = std::erfc(std::abs(vd - 2.0 * nd * pi * (1.0 - pi)) /
                             (2.0 * std::sqrt(2.0 * nd) * pi * (1.0 - pi)));
  return make_report("runs", vd, p, alpha, n);
}

GofReport longest_run_test(const BitBlock& bits, double alpha) {
  const std::size_t n = bits.size();
  std::size_t m;
  int lo;
  std::vector<double> pi;
  if (n < 128) {
    throw std::invalid_argument("longest-run test needs at least 128 bits");
  } else if (n < 6272) {
    m = 8;
    lo = 1;
    pi = {0.2148, 0.3672, 0.2305, 0.1875};
  } else if (n < 750000) {
    m = 128;
    lo = 4;
    pi = {0.1174, 0.2430, 0.2493, 0.1752, 0.1027, 0.1124};
  } else {
    m = 10000;
    lo = 10;
    pi = {0.0882, 0.2092, 0.2483, 0.1933, 0.1208, 0.0675, 0.0727};
  }
  const std::size_t blocks = n / m;
  const int hi = lo + static_cast<int>(pi.size()) - 1;
  std::vector<double> counts(pi.size(), 0.0);
  for (std::size_t b = 0; b < blocks; ++b) {
    int run = 0, best = 0;
    for (std::size_t i = b * m; i < (b + 1) * m; ++i) {
      run = bits.get(i) ? run + 1 : 0;
      best = std::max(best, run);
    }
    counts[static_cast<std::size_t>(std::clamp(best, lo, hi) - lo)] += 1.0;
  }
  double chi = 0.0;
  const double nb = static_cast<double>(blocks);
  for (std::size_t k = 0; k < pi.size(); ++k) chi += (counts[k] - nb * pi[k]) * (counts[k] - nb * pi[k]) / (nb * pi[k]);
  const double dof = static_cast<double>(pi.size() - 1);
  return make_report("longest_run", chi, igamc(dof / 2.0, chi / 2.0), alpha, n);
}

std::vector<GofReport> bit_tests(const BitBlock& bits, double alpha) {
  if (bits.size() < kBitTestMinBits)
    throw std::invalid_argument("bit tests need at least 10^6 bits, got " + std::to_string(bits.size()));
  return {monobit_test(bits, alpha), block_frequency_test(bits, 128, alpha), runs_test(bits, alpha),
          longest_run_test(bits, alpha)};
}

}  // namespace triqrng
