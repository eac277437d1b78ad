#include "triqrng/spectrum.hpp"

#include <fftw3.h>

#include <bit>
#include <cmath>
#include <memory>
#include <mutex>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace triqrng {

namespace {

// FFTW's planner is not thread-safe; execution on distinct plans is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwFree {
  void operator()(void* p) const { fftw_free(p); }
};

class RealFft {
 public:
  explicit RealFft(std::size_t n)
      : n_(n),
        in_(static_cast<double*>(fftw_malloc(sizeof(double) * n))),
        out_(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * (n / 2 + 1)))) {
    if (!in_ || !out_) throw std::bad_alloc();
    std::lock_guard lock(planner_mutex());
    plan_ = fftw_plan_dft_r2c_1d(static_cast<int>(n), in_.get(), out_.get(), FFTW_ESTIMATE);
    if (!plan_) throw std::runtime_error("FFTW planning failed");
  }
  ~RealFft() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan_);
  }
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  double* input() { return in_.get(); }
  const fftw_complex* execute() {
    fftw_execute(plan_);
    return out_.get();
  }

 private:
  std::size_t n_;
  std::unique_ptr<double, FftwFree> in_;
  std::unique_ptr<fftw_complex, FftwFree> out_;
  fftw_plan plan_ = nullptr;
};

}  // namespace

std::vector<PsdBin> psd_estimate(std::span<const double> samples, std::size_t segment_length,
                                 double sample_rate_hz) {
  if (segment_length < 8 || !std::has_single_bit(segment_length))
    throw std::invalid_argument("segment length must be a power of two >= 8");
  if (samples.size() < segment_length) throw std::invalid_argument("fewer samples than one segment");
  if (!(sample_rate_hz > 0.0)) throw std::invalid_argument("sample rate must be positive");

  const std::size_t L = segment_length;
  const double mean = std::accumulate(samples.begin(), samples.end(), 0.0) / static_cast<double>(samples.size());

  // Periodic Hann window.
  std::vector<double> window(L);
  for (std::size_t k = 0; k < L; ++k)
    window[k] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(L));
  const double u = std::inner_product(window.begin(), window.end(), window.begin(), 0.0);

  const std::size_t bins = L / 2 + 1;
  std::vector<double> acc(bins, 0.0);
  RealFft fft(L);
  const std::size_t hop = L / 2;
  std::size_t segments = 0;
  for (std::size_t start = 0; start + L <= samples.size(); start += hop) {
    double* in = fft.input();
    for (std::size_t k = 0; k < L; ++k) in[k] = (samples[start + k] - mean) * window[k];
    const fftw_complex* X = fft.execute();
    for (std::size_t j = 0; j < bins; ++j) acc[j] += X[j][0] * X[j][0] + X[j][1] * X[j][1];
    ++segments;
  }

  std::vector<PsdBin> psd(bins);
  const double norm = 1.0 / (sample_rate_hz * u * static_cast<double>(segments));
  for (std::size_t j = 0; j < bins; ++j) {
    const double one_sided = (j == 0 || j == bins - 1) ? 1.0 : 2.0;
    psd[j].frequency_hz = sample_rate_hz * static_cast<double>(j) / static_cast<double>(L);
    psd[j].density = one_sided * acc[j] * norm;
  }
  return psd;
}

double integrate_psd(std::span<const PsdBin> psd) {
  if (psd.size() < 2) throw std::invalid_argument("PSD needs at least two bins");
  const double df = psd[1].frequency_hz - psd[0].frequency_hz;
  double total = 0.0;
  for (const auto& b : psd) total += b.density;
  return total * df;
}

}  // namespace triqrng
