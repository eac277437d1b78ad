#include "triqrng/io.hpp"

#include <bit>
#include <fstream>
#include <iterator>
#include <limits>
#include <stdexcept>
#include <string>

namespace triqrng::io {

std::vector<std::uint8_t> read_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> data) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
  if (!out) throw std::runtime_error("short write to " + path.string());
}

void append_u32_le(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void append_s16_le(std::vector<std::uint8_t>& out, std::int16_t v) {
  const auto u = static_cast<std::uint16_t>(v);
  out.push_back(static_cast<std::uint8_t>(u));
  out.push_back(static_cast<std::uint8_t>(u >> 8));
}

void append_f32_le(std::vector<std::uint8_t>& out, float v) {
  append_u32_le(out, std::bit_cast<std::uint32_t>(v));
}

std::uint32_t load_u32_le(std::span<const std::uint8_t> in, std::size_t offset) {
  if (offset + 4 > in.size()) throw std::out_of_range("load_u32_le past end");
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= std::uint32_t{in[offset + i]} << (8 * i);
  return v;
}

std::int16_t load_s16_le(std::span<const std::uint8_t> in, std::size_t offset) {
  if (offset + 2 > in.size()) throw std::out_of_range("load_s16_le past end");
  const auto u = static_cast<std::uint16_t>(in[offset] | (in[offset + 1] << 8));
  return static_cast<std::int16_t>(u);
}

float load_f32_le(std::span<const std::uint8_t> in, std::size_t offset) {
  return std::bit_cast<float>(load_u32_le(in, offset));
}

std::vector<std::uint8_t> encode_s16(std::span<const std::int32_t> values) {
  std::vector<std::uint8_t> out;
  out.reserve(values.size() * 2);
  for (std::int32_t v : values) {
    if (v < std::numeric_limits<std::int16_t>::min() || v > std::numeric_limits<std::int16_t>::max())
      throw std::invalid_argument("value " + std::to_string(v) + " does not fit in 16 bits");
    append_s16_le(out, static_cast<std::int16_t>(v));
  }
  return out;
}

std::vector<std::int32_t> decode_s16(std::span<const std::uint8_t> bytes) {
  if (bytes.size() % 2 != 0) throw std::invalid_argument("s16 stream has odd byte count");
  std::vector<std::int32_t> out(bytes.size() / 2);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = load_s16_le(bytes, 2 * i);
  return out;
}

std::vector<std::uint8_t> encode_f32(std::span<const double> values) {
  std::vector<std::uint8_t> out;
  out.reserve(values.size() * 4);
  for (double v : values) append_f32_le(out, static_cast<float>(v));
  return out;
}

std::vector<double> decode_f32(std::span<const std::uint8_t> bytes) {
  if (bytes.size() % 4 != 0) throw std::invalid_argument("f32 stream length not a multiple of 4");
  std::vector<double> out(bytes.size() / 4);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = load_f32_le(bytes, 4 * i);
  return out;
}

}  // namespace triqrng::io
