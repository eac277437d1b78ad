#include "triqrng/dodis.hpp"

#include <stdexcept>
#include <string>

#include "triqrng/errors.hpp"
#include "triqrng/gf2.hpp"

namespace triqrng {

namespace {

bool is_prime(std::size_t n) {
  if (n < 2) return false;
  for (std::size_t d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

std::uint64_t pow_mod(std::uint64_t base, std::uint64_t exp, std::uint64_t mod) {
  std::uint64_t r = 1 % mod;
  base %= mod;
  while (exp != 0) {
    if (exp & 1U) r = static_cast<std::uint64_t>(static_cast<unsigned __int128>(r) * base % mod);
    base = static_cast<std::uint64_t>(static_cast<unsigned __int128>(base) * base % mod);
    exp >>= 1;
  }
  return r;
}

}  // namespace

bool is_dodis_admissible(std::size_t n) {
  if (n < 3 || !is_prime(n)) return false;
  // 2 is a generator iff 2^((n-1)/q) != 1 for every prime q dividing n-1.
  std::size_t rest = n - 1;
  for (std::size_t q = 2; q * q <= rest; ++q) {
    if (rest % q != 0) continue;
    if (pow_mod(2, (n - 1) / q, n) == 1) return false;
    while (rest % q == 0) rest /= q;
  }
  if (rest > 1 && pow_mod(2, (n - 1) / rest, n) == 1) return false;
  return true;
}

std::size_t next_admissible_prime(std::size_t at_least) {
  for (std::size_t n = std::max<std::size_t>(at_least, 3);; ++n)
    if (is_dodis_admissible(n)) return n;
}

std::vector<std::size_t> admissible_primes(std::size_t limit) {
  std::vector<std::size_t> out;
  for (std::size_t n = 3; n <= limit; ++n)
    if (is_dodis_admissible(n)) out.push_back(n);
  return out;
}

BitBlock cyclic_convolution(const BitBlock& x, const BitBlock& y) {
  if (x.size() != y.size()) throw std::invalid_argument("convolution operands differ in length");
  const std::size_t n = x.size();
  if (n == 0) throw std::invalid_argument("empty convolution operands");
  const auto product = gf2::multiply(x.words(), y.words());
  const auto full = BitBlock::from_words(product, 2 * n - 1);
  BitBlock low = full.slice(0, n);
  BitBlock high = full.slice(n, n - 1);
  high.push_back(false);
  return low ^= high;
}

BitBlock dodis_extract(const BitBlock& x, const BitBlock& y, std::size_t m) {
  const std::size_t n = x.size();
  if (y.size() != n) throw std::invalid_argument("Dodis sources must have equal length");
  if (!is_dodis_admissible(n))
    throw std::invalid_argument("Dodis input length " + std::to_string(n) +
                                " is not a prime with 2 as a primitive root");
  if (m > n) throw std::invalid_argument("Dodis output length exceeds input length");
  return cyclic_convolution(x, y).slice(0, m);
}

std::size_t seed_chain_block_count(std::size_t n, std::size_t m, const SeedChainOptions& options) {
  if (options.output_bits == 0) throw std::invalid_argument("Dodis output length must be positive");
  const std::size_t len = n + m - 1;
  return 2 * ((len + options.output_bits - 1) / options.output_bits);
}

ToeplitzSeed seed_chain(const BitBlockStream& stream, std::size_t n, std::size_t m,
                        const SeedChainOptions& options) {
  if (n == 0 || m == 0 || m > n) throw std::invalid_argument("invalid Toeplitz geometry");
  const std::size_t dodis_n = next_admissible_prime(options.chunk_bits);
  if (options.output_bits == 0 || options.output_bits > dodis_n)
    throw std::invalid_argument("Dodis output length must be in [1, " + std::to_string(dodis_n) + "]");

  auto draw = [&]() {
    auto block = stream();
    if (!block) throw StreamExhausted("entropy stream ended while building the Toeplitz seed");
    if (block->size() < dodis_n)
      throw std::invalid_argument("raw block of " + std::to_string(block->size()) + " bits is shorter than the " +
                                  std::to_string(dodis_n) + "-bit Dodis input");
    return block->slice(0, dodis_n);
  };

  const std::size_t len = n + m - 1;
  BitBlock seed;
  while (seed.size() < len) {
    const BitBlock x = draw();
    const BitBlock y = draw();
    const std::size_t take = std::min(options.output_bits, len - seed.size());
    seed.append(dodis_extract(x, y, take));
  }
  return ToeplitzSeed(std::move(seed), n, m);
}

}  // namespace triqrng
