#include "triqrng/adc.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

#include "triqrng/io.hpp"
#include "triqrng/random.hpp"

namespace triqrng {

void AdcSpec::validate() const {
  if (bits < 4 || bits > 24) throw std::invalid_argument("ADC bits must be in [4, 24]");
  if (!(range_v > 0.0)) throw std::invalid_argument("ADC range must be positive");
  if (!(dnl_max >= 0.0)) throw std::invalid_argument("DNL bound must be non-negative");
  if (dnl_max >= 0.5) throw std::invalid_argument("DNL bound >= 0.5 LSB could invert bins");
}

double AdcSpec::bin_width() const { return range_v / std::ldexp(1.0, bits); }

AdcSpec AdcSpec::paper_like() {
  AdcSpec s;
  s.bits = 16;
  s.range_v = 0.128;
  s.dnl_max = 0.25;
  s.dnl_seed = 7;
  return s;
}

std::vector<double> dnl_profile(const AdcSpec& spec) {
  spec.validate();
  std::vector<double> offsets(spec.levels() - 1, 0.0);
  if (spec.dnl_max == 0.0) return offsets;
  auto engine = make_engine(spec.dnl_seed, {0xd71u});
  const double half = 0.5 * spec.dnl_max * spec.bin_width();
  constexpr double kScale = 1.0 / static_cast<double>(std::uint64_t{1} << 53);
  for (double& o : offsets) {
    const double u = static_cast<double>(engine() >> 11) * kScale;  // [0, 1)
    o = (2.0 * u - 1.0) * half;
  }
  return offsets;
}

Quantizer::Quantizer(const AdcSpec& spec) : spec_(spec), dx_(0.0), half_range_(0.0) {
  spec_.validate();
  dx_ = spec_.bin_width();
  half_range_ = 0.5 * spec_.range_v;
  if (spec_.dnl_max > 0.0) {
    const auto offsets = dnl_profile(spec_);
    edges_.resize(offsets.size());
    for (std::size_t k = 0; k < offsets.size(); ++k)
      edges_[k] = -half_range_ + static_cast<double>(k + 1) * dx_ + offsets[k];
  }
}

double Quantizer::edge(std::size_t u) const {
  if (u == 0 || u >= spec_.levels()) throw std::out_of_range("bin edge index out of range");
  return edges_.empty() ? -half_range_ + static_cast<double>(u) * dx_ : edges_[u - 1];
}

std::int32_t Quantizer::quantize(double v, bool* clamped) const {
  const auto top = static_cast<std::int64_t>(spec_.levels()) - 1;
  const bool out = !(v >= -half_range_ && v < half_range_);
  if (clamped) *clamped = out;
  std::int64_t u;
  if (out) {
    u = v >= half_range_ ? top : 0;  // NaN lands on the bottom code
  } else {
    u = std::clamp(static_cast<std::int64_t>(std::floor((v + half_range_) / dx_)), std::int64_t{0}, top);
    if (!edges_.empty()) {
      // Offsets are below half a bin, so at most one step either way.
      if (u > 0 && v < edges_[static_cast<std::size_t>(u - 1)]) --u;
      else if (u < top && v >= edges_[static_cast<std::size_t>(u)]) ++u;
    }
  }
  return static_cast<std::int32_t>(u + spec_.min_code());
}

CodeBlock Quantizer::quantize(std::span<const double> volts) const {
  CodeBlock block;
  block.spec = spec_;
  block.codes.resize(volts.size());
  for (std::size_t t = 0; t < volts.size(); ++t) {
    bool c = false;
    block.codes[t] = quantize(volts[t], &c);
    block.clamped += c ? 1 : 0;
  }
  return block;
}

double Quantizer::dequantize(std::int32_t code) const {
  if (code < spec_.min_code() || code > spec_.max_code())
    throw std::out_of_range("code " + std::to_string(code) + " outside the ADC range");
  const double u = static_cast<double>(code - spec_.min_code());
  return -half_range_ + (u + 0.5) * dx_;
}

std::pair<CodeBlock, CodeBlock> quantize(const QuadratureFrame& frame, const AdcSpec& spec) {
  if (frame.i.size() != frame.q.size()) throw std::invalid_argument("I and Q records differ in length");
  const Quantizer qz(spec);
  return {qz.quantize(frame.i), qz.quantize(frame.q)};
}

std::vector<double> dequantize(const CodeBlock& block) {
  const Quantizer qz(AdcSpec{block.spec.bits, block.spec.range_v, 0.0, 0});
  std::vector<double> out(block.codes.size());
  for (std::size_t t = 0; t < out.size(); ++t) out[t] = qz.dequantize(block.codes[t]);
  return out;
}

void write_codes_s16(const std::filesystem::path& path, const CodeBlock& block) {
  if (block.spec.bits > 16) throw std::invalid_argument("s16 export needs bits <= 16");
  io::write_bytes(path, io::encode_s16(block.codes));
}

CodeBlock read_codes_s16(const std::filesystem::path& path, const AdcSpec& spec) {
  spec.validate();
  if (spec.bits > 16) throw std::invalid_argument("s16 import needs bits <= 16");
  CodeBlock block;
  block.spec = spec;
  block.codes = io::decode_s16(io::read_bytes(path));
  for (std::int32_t c : block.codes)
    if (c < spec.min_code() || c > spec.max_code())
      throw std::invalid_argument("code " + std::to_string(c) + " does not fit " + std::to_string(spec.bits) +
                                  " bits");
  return block;
}

}  // namespace triqrng
