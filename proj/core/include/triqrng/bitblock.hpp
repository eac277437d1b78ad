#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace triqrng {

/// Packed bit string with an explicit length.
///
/// Bit i lives in word i/64 at position i%64, so the words double as the
/// coefficient vector of a GF(2) polynomial (bit i = coefficient of t^i).
/// Byte serialization is MSB-first: bit 0 is the high bit of byte 0. Padding
/// bits past size() are always zero.
class BitBlock {
 public:
  BitBlock() = default;
  explicit BitBlock(std::size_t len) : words_((len + 63) / 64, 0), len_(len) {}

  /// Takes ownership of `words`; bits past len are cleared.
  static BitBlock from_words(std::vector<std::uint64_t> words, std::size_t len);
  /// MSB-first bytes; len defaults to 8 * bytes.size().
  static BitBlock from_bytes(std::span<const std::uint8_t> bytes);
  static BitBlock from_bytes(std::span<const std::uint8_t> bytes, std::size_t len);
  /// '0'/'1' characters, bit 0 first.
  static BitBlock from_string(std::string_view s);

  std::size_t size() const { return len_; }
  bool empty() const { return len_ == 0; }
  std::span<const std::uint64_t> words() const { return words_; }

  bool get(std::size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1U; }
  void set(std::size_t i, bool v) {
    const std::uint64_t mask = std::uint64_t{1} << (i & 63);
    if (v)
      words_[i >> 6] |= mask;
    else
      words_[i >> 6] &= ~mask;
  }

  void push_back(bool v);
  void append(const BitBlock& other);
  /// Bits [offset, offset + len).
  BitBlock slice(std::size_t offset, std::size_t len) const;

  std::size_t popcount() const;
  std::vector<std::uint8_t> to_bytes() const;
  std::string to_string() const;

  BitBlock& operator^=(const BitBlock& other);
  friend BitBlock operator^(BitBlock a, const BitBlock& b) { return a ^= b; }
  friend bool operator==(const BitBlock& a, const BitBlock& b) = default;

 private:
  void clear_padding();

  std::vector<std::uint64_t> words_;
  std::size_t len_ = 0;
};

/// Concatenates the low `bits` bits of each code, most significant bit first
/// (two's-complement bit pattern of the signed code).
BitBlock pack_codes(std::span<const std::int32_t> codes, int bits);

}  // namespace triqrng
