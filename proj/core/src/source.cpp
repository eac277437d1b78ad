#include "triqrng/source.hpp"

#include <cmath>
#include <fstream>
#include <numeric>
#include <stdexcept>
#include <string>

#include "triqrng/io.hpp"
#include "triqrng/stats.hpp"

namespace triqrng {

namespace {

constexpr std::uint32_t kQuantumLabel = 0;
constexpr std::uint32_t kExcessLabel = 1;

double tap_energy(std::span<const double> taps) {
  return std::inner_product(taps.begin(), taps.end(), taps.begin(), 0.0);
}

}  // namespace

void NoiseModel::validate(bool allow_dark) const {
  if (allow_dark ? !(sigma_q2 >= 0.0) : !(sigma_q2 > 0.0))
    throw std::invalid_argument("sigma_q2 must be positive");
  if (!(sigma_e2 >= 0.0)) throw std::invalid_argument("sigma_e2 must be non-negative");
  if (sigma_e2_q && !(*sigma_e2_q >= 0.0)) throw std::invalid_argument("sigma_e2_q must be non-negative");
  if (filter_taps.empty()) throw std::invalid_argument("filter_taps is empty");
  if (std::abs(tap_energy(filter_taps) - 1.0) > 1e-9)
    throw std::invalid_argument("filter_taps must have unit energy (sum of squares == 1)");
  if (!(lo_power_mw >= 0.0)) throw std::invalid_argument("lo_power_mw must be non-negative");
  if (!(responsivity > 0.0)) throw std::invalid_argument("responsivity must be positive");
  if (std::abs(responsivity * lo_power_mw - sigma_q2) > 1e-9 * std::max(sigma_q2, 1e-300))
    throw std::invalid_argument("sigma_q2 must equal responsivity * lo_power_mw");
  if (!(saturation_v >= 0.0)) throw std::invalid_argument("saturation_v must be non-negative");
}

NoiseModel NoiseModel::at_lo_power(double mw) const {
  if (!(mw >= 0.0)) throw std::invalid_argument("LO power must be non-negative");
  NoiseModel m = *this;
  m.lo_power_mw = mw;
  m.sigma_q2 = responsivity * mw;
  return m;
}

NoiseModel NoiseModel::paper_like() {
  NoiseModel m;
  m.lo_power_mw = 4.13;
  m.sigma_q2 = 1.6e-4;
  m.responsivity = m.sigma_q2 / m.lo_power_mw;
  m.sigma_e2 = 6.0e-5;
  m.filter_taps = geometric_taps(8, 0.85);
  m.saturation_v = 2.0 * std::sqrt(m.sigma_q2);
  return m;
}

NoiseModel NoiseModel::quiet() {
  NoiseModel m = paper_like();
  m.sigma_e2 = 0.0;
  m.sigma_e2_q.reset();
  return m;
}

std::vector<double> normalize_taps(std::vector<double> taps) {
  const double energy = tap_energy(taps);
  if (!(energy > 0.0)) throw std::invalid_argument("filter taps are all zero");
  const double scale = 1.0 / std::sqrt(energy);
  for (double& t : taps) t *= scale;
  return taps;
}

std::vector<double> geometric_taps(std::size_t count, double decay) {
  if (count == 0) throw std::invalid_argument("tap count must be positive");
  std::vector<double> taps(count);
  double v = 1.0;
  for (double& t : taps) {
    t = v;
    v *= decay;
  }
  return normalize_taps(std::move(taps));
}

QuadratureSource::QuadratureSource(const NoiseModel& model, std::uint64_t seed, std::uint32_t stream,
                                   double sample_rate_hz, bool allow_dark)
    : model_(model),
      sample_rate_hz_(sample_rate_hz),
      sigma_q_(0.0),
      i_{GaussianSampler(make_engine(seed, {stream, 0, kQuantumLabel})),
         GaussianSampler(make_engine(seed, {stream, 0, kExcessLabel})), {}, 0.0},
      q_{GaussianSampler(make_engine(seed, {stream, 1, kQuantumLabel})),
         GaussianSampler(make_engine(seed, {stream, 1, kExcessLabel})), {}, 0.0} {
  model_.validate(allow_dark);
  if (!(sample_rate_hz > 0.0)) throw std::invalid_argument("sample rate must be positive");
  sigma_q_ = std::sqrt(model_.sigma_q2);
  i_.sigma_e = std::sqrt(model_.excess_variance(0));
  q_.sigma_e = std::sqrt(model_.excess_variance(1));
  // Start in steady state: prime the delay line with white noise.
  const std::size_t hist = model_.filter_taps.size() - 1;
  for (Channel* ch : {&i_, &q_}) {
    ch->history.resize(hist);
    ch->quantum.fill(ch->history, sigma_q_);
  }
}

void QuadratureSource::generate(Channel& ch, std::span<double> out) {
  const auto& taps = model_.filter_taps;
  const std::size_t hist = taps.size() - 1;
  scratch_.resize(hist + out.size());
  std::copy(ch.history.begin(), ch.history.end(), scratch_.begin());
  ch.quantum.fill(std::span(scratch_).subspan(hist), sigma_q_);

  const double vsat = model_.saturation_v;
  for (std::size_t t = 0; t < out.size(); ++t) {
    const double* w = scratch_.data() + t + hist;  // w[0] is the newest sample
    double acc = 0.0;
    for (std::size_t k = 0; k < taps.size(); ++k) acc += taps[k] * *(w - k);
    if (vsat > 0.0) acc = vsat * std::tanh(acc / vsat);
    out[t] = acc;
  }
  std::copy(scratch_.end() - static_cast<std::ptrdiff_t>(hist), scratch_.end(), ch.history.begin());

  if (ch.sigma_e > 0.0)
    for (double& x : out) x += ch.sigma_e * ch.excess();
}

void QuadratureSource::next_into(std::span<double> i, std::span<double> q) {
  if (i.size() != q.size()) throw std::invalid_argument("I and Q buffers differ in length");
  generate(i_, i);
  generate(q_, q);
}

QuadratureFrame QuadratureSource::next(std::size_t count) {
  if (count == 0) throw std::invalid_argument("sample count must be positive");
  QuadratureFrame f;
  f.sample_rate_hz = sample_rate_hz_;
  f.i.resize(count);
  f.q.resize(count);
  next_into(f.i, f.q);
  return f;
}

QuadratureFrame simulate_quadratures(const NoiseModel& model, std::size_t count, std::uint64_t seed) {
  return QuadratureSource(model, seed).next(count);
}

QuadratureFrame simulate_dark(const NoiseModel& model, std::size_t count, std::uint64_t seed) {
  return QuadratureSource(model.at_lo_power(0.0), seed, 0, kDefaultSampleRateHz, true).next(count);
}

std::vector<SweepPoint> lo_power_sweep(const NoiseModel& model, std::span<const double> powers_mw,
                                       std::size_t samples_per_point, std::uint64_t seed) {
  if (powers_mw.empty()) throw std::invalid_argument("power list is empty");
  if (samples_per_point < 2) throw std::invalid_argument("need at least two samples per point");
  for (double p : powers_mw)
    if (!(p >= 0.0)) throw std::invalid_argument("LO power must be non-negative");

  auto channel_variance = [](const QuadratureFrame& f) {
    return 0.5 * (sample_variance(f.i) + sample_variance(f.q));
  };

  std::vector<SweepPoint> points;
  points.reserve(powers_mw.size());
  std::uint32_t stream = 1;
  for (double p : powers_mw) {
    QuadratureSource lit(model.at_lo_power(p), seed, stream++, kDefaultSampleRateHz, true);
    QuadratureSource dark(model.at_lo_power(0.0), seed, stream++, kDefaultSampleRateHz, true);
    points.push_back({p, channel_variance(lit.next(samples_per_point)),
                      channel_variance(dark.next(samples_per_point))});
  }
  return points;
}

void write_frame_f32(const std::filesystem::path& path, const QuadratureFrame& frame) {
  std::vector<std::uint8_t> out;
  out.reserve(frame.size() * 8);
  for (std::size_t t = 0; t < frame.size(); ++t) {
    io::append_f32_le(out, static_cast<float>(frame.i[t]));
    io::append_f32_le(out, static_cast<float>(frame.q[t]));
  }
  io::write_bytes(path, out);
}

void write_frame_csv(const std::filesystem::path& path, const QuadratureFrame& frame) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.precision(9);
  out << "index,I,Q\n";
  for (std::size_t t = 0; t < frame.size(); ++t) out << t << ',' << frame.i[t] << ',' << frame.q[t] << '\n';
}

QuadratureFrame read_frame_f32(const std::filesystem::path& path, double sample_rate_hz) {
  const auto values = io::decode_f32(io::read_bytes(path));
  if (values.size() % 2 != 0) throw std::invalid_argument("interleaved frame has an odd value count");
  QuadratureFrame f;
  f.sample_rate_hz = sample_rate_hz;
  f.i.reserve(values.size() / 2);
  f.q.reserve(values.size() / 2);
  for (std::size_t t = 0; t < values.size(); t += 2) {
    f.i.push_back(values[t]);
    f.q.push_back(values[t + 1]);
  }
  return f;
}

}  // namespace triqrng
