#include "triqrng/toeplitz.hpp"

#include <random>
#include <stdexcept>
#include <string>

#include "triqrng/gf2.hpp"
#include "triqrng/io.hpp"
#include "triqrng/random.hpp"

namespace triqrng {

ToeplitzSeed::ToeplitzSeed(BitBlock bits, std::size_t n, std::size_t m) : bits_(std::move(bits)), n_(n), m_(m) {
  if (n == 0 || m == 0) throw std::invalid_argument("Toeplitz dimensions must be positive");
  if (m > n) throw std::invalid_argument("Toeplitz output length exceeds input length");
  if (bits_.size() != n + m - 1)
    throw std::invalid_argument("Toeplitz seed must have n + m - 1 = " + std::to_string(n + m - 1) + " bits, got " +
                                std::to_string(bits_.size()));
}

ToeplitzSeed ToeplitzSeed::random(std::size_t n, std::size_t m, std::uint64_t prng_seed) {
  auto engine = make_engine(prng_seed, {0x70e9u});
  const std::size_t len = n + m - 1;
  std::vector<std::uint64_t> words((len + 63) / 64);
  for (auto& w : words) w = engine();
  return ToeplitzSeed(BitBlock::from_words(std::move(words), len), n, m);
}

void ToeplitzSeed::save(const std::filesystem::path& path) const {
  std::vector<std::uint8_t> out;
  io::append_u32_le(out, static_cast<std::uint32_t>(n_));
  io::append_u32_le(out, static_cast<std::uint32_t>(m_));
  const auto packed = bits_.to_bytes();
  out.insert(out.end(), packed.begin(), packed.end());
  io::write_bytes(path, out);
}

ToeplitzSeed ToeplitzSeed::load(const std::filesystem::path& path) {
  const auto raw = io::read_bytes(path);
  if (raw.size() < 8) throw std::runtime_error("seed file " + path.string() + " is truncated");
  const std::size_t n = io::load_u32_le(raw, 0);
  const std::size_t m = io::load_u32_le(raw, 4);
  const std::size_t len = n + m - 1;
  const std::span<const std::uint8_t> payload(raw.data() + 8, raw.size() - 8);
  if (n == 0 || m == 0 || payload.size() != (len + 7) / 8)
    throw std::runtime_error("seed file " + path.string() + " has an inconsistent length");
  return ToeplitzSeed(BitBlock::from_bytes(payload, len), n, m);
}

namespace {

void check_lengths(const BitBlock& input, const ToeplitzSeed& seed, std::size_t m) {
  if (input.size() != seed.n())
    throw std::invalid_argument("input has " + std::to_string(input.size()) + " bits, seed expects " +
                                std::to_string(seed.n()));
  if (m != seed.m())
    throw std::invalid_argument("requested " + std::to_string(m) + " output bits, seed built for " +
                                std::to_string(seed.m()));
}

}  // namespace

BitBlock toeplitz_extract(const BitBlock& input, const ToeplitzSeed& seed, std::size_t m) {
  check_lengths(input, seed, m);
  BitBlock out(m);
  for (std::size_t i = 0; i < m; ++i) {
    bool parity = false;
    for (std::size_t j = 0; j < seed.n(); ++j) parity ^= seed.entry(i, j) && input.get(j);
    out.set(i, parity);
  }
  return out;
}

BitBlock toeplitz_extract_fast(const BitBlock& input, const ToeplitzSeed& seed, std::size_t m) {
  check_lengths(input, seed, m);
  const auto product = gf2::multiply(seed.bits().words(), input.words());
  const auto full = BitBlock::from_words(product, product.size() * 64);
  return full.slice(seed.n() - 1, m);
}

}  // namespace triqrng
