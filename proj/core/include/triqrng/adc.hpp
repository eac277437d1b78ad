#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <utility>
#include <vector>

#include "triqrng/source.hpp"

namespace triqrng {

/// Digitizer geometry. range_v is the total conversion span, so codes cover
/// [-range_v/2, range_v/2) in bins of width range_v / 2^bits.
struct AdcSpec {
  int bits = 16;
  double range_v = 0.128;
  double dnl_max = 0.0;  // per-bin width deviation bound, units of the ideal bin width
  std::uint64_t dnl_seed = 0;

  void validate() const;
  double bin_width() const;
  std::int32_t min_code() const { return -(std::int32_t{1} << (bits - 1)); }
  std::int32_t max_code() const { return (std::int32_t{1} << (bits - 1)) - 1; }
  std::size_t levels() const { return std::size_t{1} << bits; }

  /// 16-bit, 128 mVpp, DNL bound 0.25 LSB.
  static AdcSpec paper_like();
};

struct CodeBlock {
  std::vector<std::int32_t> codes;
  AdcSpec spec;
  std::size_t clamped = 0;  // inputs outside the conversion span

  std::size_t size() const { return codes.size(); }
  double clamped_fraction() const {
    return codes.empty() ? 0.0 : static_cast<double>(clamped) / static_cast<double>(codes.size());
  }
};

/// Offsets of the 2^bits - 1 interior bin edges from their ideal positions,
/// drawn uniformly from [-dnl_max/2, dnl_max/2] * bin width with dnl_seed.
/// Two adjacent edges can move apart by at most dnl_max * bin width, so every
/// realized bin width lies in [1 - dnl_max, 1 + dnl_max] ideal widths and the
/// entropy bound's worst-case bin (1 + dnl_max) holds. Rejects dnl_max >= 0.5.
std::vector<double> dnl_profile(const AdcSpec& spec);

/// Voltage-to-code map with a fixed DNL profile. Immutable after
/// construction, safe for concurrent use.
class Quantizer {
 public:
  explicit Quantizer(const AdcSpec& spec);

  /// Signed code of the (perturbed) bin containing v. Out-of-span inputs
  /// clamp to the extreme codes and set *clamped when given.
  std::int32_t quantize(double v, bool* clamped = nullptr) const;
  CodeBlock quantize(std::span<const double> volts) const;
  /// Center of the ideal bin for `code`.
  double dequantize(std::int32_t code) const;

  const AdcSpec& spec() const { return spec_; }
  /// Lower edge of offset-binary bin u, u in [1, 2^bits - 1].
  double edge(std::size_t u) const;

 private:
  AdcSpec spec_;
  double dx_;
  double half_range_;
  std::vector<double> edges_;  // empty for an ideal ADC
};

std::pair<CodeBlock, CodeBlock> quantize(const QuadratureFrame& frame, const AdcSpec& spec);
std::vector<double> dequantize(const CodeBlock& block);

/// Little-endian signed 16-bit samples; requires bits <= 16.
void write_codes_s16(const std::filesystem::path& path, const CodeBlock& block);
CodeBlock read_codes_s16(const std::filesystem::path& path, const AdcSpec& spec);

}  // namespace triqrng
