#include "triqrng/bitblock.hpp"

#include <bit>
#include <stdexcept>

namespace triqrng {

void BitBlock::clear_padding() {
  const std::size_t tail = len_ & 63;
  if (tail != 0) words_.back() &= (std::uint64_t{1} << tail) - 1;
}

BitBlock BitBlock::from_words(std::vector<std::uint64_t> words, std::size_t len) {
  if (words.size() * 64 < len) throw std::invalid_argument("word storage shorter than bit length");
  words.resize((len + 63) / 64);
  BitBlock b;
  b.words_ = std::move(words);
  b.len_ = len;
  b.clear_padding();
  return b;
}

BitBlock BitBlock::from_bytes(std::span<const std::uint8_t> bytes) { return from_bytes(bytes, bytes.size() * 8); }

BitBlock BitBlock::from_bytes(std::span<const std::uint8_t> bytes, std::size_t len) {
  if (bytes.size() * 8 < len) throw std::invalid_argument("byte buffer shorter than bit length");
  BitBlock b(len);
  for (std::size_t i = 0; i < len; ++i)
    if ((bytes[i >> 3] >> (7 - (i & 7))) & 1U) b.words_[i >> 6] |= std::uint64_t{1} << (i & 63);
  return b;
}

BitBlock BitBlock::from_string(std::string_view s) {
  BitBlock b(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '1')
      b.set(i, true);
    else if (s[i] != '0')
      throw std::invalid_argument("bit string may contain only '0' and '1'");
  }
  return b;
}

void BitBlock::push_back(bool v) {
  if ((len_ & 63) == 0) words_.push_back(0);
  ++len_;
  set(len_ - 1, v);
}

void BitBlock::append(const BitBlock& other) {
  if (other.len_ == 0) return;
  const std::size_t shift = len_ & 63;
  const std::size_t new_len = len_ + other.len_;
  if (shift == 0) {
    words_.insert(words_.end(), other.words_.begin(), other.words_.end());
  } else {
    words_.resize((new_len + 63) / 64, 0);
    std::size_t w = len_ >> 6;
    for (std::uint64_t word : other.words_) {
      words_[w] |= word << shift;
      if (w + 1 < words_.size()) words_[w + 1] |= word >> (64 - shift);
      ++w;
    }
  }
  len_ = new_len;
}

BitBlock BitBlock::slice(std::size_t offset, std::size_t len) const {
  if (offset > len_ || len > len_ - offset) throw std::out_of_range("slice past end of bit block");
  BitBlock out(len);
  const std::size_t word0 = offset >> 6;
  const std::size_t shift = offset & 63;
  for (std::size_t w = 0; w < out.words_.size(); ++w) {
    std::uint64_t v = words_[word0 + w] >> shift;
    if (shift != 0 && word0 + w + 1 < words_.size()) v |= words_[word0 + w + 1] << (64 - shift);
    out.words_[w] = v;
  }
  out.clear_padding();
  return out;
}

std::size_t BitBlock::popcount() const {
  std::size_t c = 0;
  for (std::uint64_t w : words_) c += static_cast<std::size_t>(std::popcount(w));
  return c;
}

std::vector<std::uint8_t> BitBlock::to_bytes() const {
  std::vector<std::uint8_t> out((len_ + 7) / 8, 0);
  for (std::size_t i = 0; i < len_; ++i)
    if (get(i)) out[i >> 3] |= static_cast<std::uint8_t>(0x80U >> (i & 7));
  return out;
}

std::string BitBlock::to_string() const {
  std::string s(len_, '0');
  for (std::size_t i = 0; i < len_; ++i)
    if (get(i)) s[i] = '1';
  return s;
}

BitBlock& BitBlock::operator^=(const BitBlock& other) {
  if (other.len_ != len_) throw std::invalid_argument("xor of bit blocks of different length");
  for (std::size_t w = 0; w < words_.size(); ++w) words_[w] ^= other.words_[w];
  return *this;
}

namespace {

std::uint32_t bit_reverse32(std::uint32_t x) {
  x = ((x >> 1) & 0x55555555U) | ((x & 0x55555555U) << 1);
  x = ((x >> 2) & 0x33333333U) | ((x & 0x33333333U) << 2);
  x = ((x >> 4) & 0x0F0F0F0FU) | ((x & 0x0F0F0F0FU) << 4);
  return __builtin_bswap32(x);
}

}  // namespace

BitBlock pack_codes(std::span<const std::int32_t> codes, int bits) {
  if (bits < 1 || bits > 32) throw std::invalid_argument("code width must be in [1, 32]");
  const auto width = static_cast<std::size_t>(bits);
  std::vector<std::uint64_t> words((codes.size() * width + 63) / 64, 0);
  std::size_t pos = 0;
  for (std::int32_t c : codes) {
    // MSB-first means the code's bit order is reversed into the LSB-first words.
    const std::uint64_t r = static_cast<std::uint64_t>(bit_reverse32(static_cast<std::uint32_t>(c)) >> (32 - bits));
    const std::size_t w = pos >> 6, off = pos & 63;
    words[w] |= r << off;
    if (off + width > 64) words[w + 1] |= r >> (64 - off);
    pos += width;
  }
  return BitBlock::from_words(std::move(words), codes.size() * width);
}

}  // namespace triqrng
