#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

// Little-endian raw file helpers shared by the CLI and the export functions.
namespace triqrng::io {

std::vector<std::uint8_t> read_bytes(const std::filesystem::path& path);
void write_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> data);

void append_u32_le(std::vector<std::uint8_t>& out, std::uint32_t v);
void append_s16_le(std::vector<std::uint8_t>& out, std::int16_t v);
void append_f32_le(std::vector<std::uint8_t>& out, float v);

std::uint32_t load_u32_le(std::span<const std::uint8_t> in, std::size_t offset);
std::int16_t load_s16_le(std::span<const std::uint8_t> in, std::size_t offset);
float load_f32_le(std::span<const std::uint8_t> in, std::size_t offset);

std::vector<std::uint8_t> encode_s16(std::span<const std::int32_t> values);
std::vector<std::int32_t> decode_s16(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> encode_f32(std::span<const double> values);
std::vector<double> decode_f32(std::span<const std::uint8_t> bytes);

}  // namespace triqrng::io
