#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "triqrng/bitblock.hpp"
#include "triqrng/toeplitz.hpp"

namespace triqrng {

/// n is prime and 2 generates the multiplicative group mod n, the condition
/// under which the cyclic-convolution two-source extractor is defined.
bool is_dodis_admissible(std::size_t n);
/// Smallest admissible n >= at_least.
std::size_t next_admissible_prime(std::size_t at_least);
/// All admissible n <= limit, ascending.
std::vector<std::size_t> admissible_primes(std::size_t limit);

/// x * y in GF(2)[t] / (t^n - 1), n = x.size() = y.size().
BitBlock cyclic_convolution(const BitBlock& x, const BitBlock& y);

/// First m bits of the cyclic convolution of two independent weak sources.
/// Throws if n is not admissible or m > n.
BitBlock dodis_extract(const BitBlock& x, const BitBlock& y, std::size_t m);

/// Pulls raw blocks; std::nullopt once the source has nothing left.
using BitBlockStream = std::function<std::optional<BitBlock>()>;

struct SeedChainOptions {
  std::size_t chunk_bits = 512;   // Dodis input length = next admissible prime >= chunk_bits
  std::size_t output_bits = 128;  // bits kept per Dodis call
};

/// Builds an n x m Toeplitz seed from n + m - 1 Dodis output bits. Each call
/// draws two fresh blocks (x then y) from the stream and uses their first
/// dodis_n bits; outputs are concatenated and the last one truncated.
/// Throws StreamExhausted if the stream ends early, std::invalid_argument if
/// a block is shorter than the Dodis input length.
ToeplitzSeed seed_chain(const BitBlockStream& stream, std::size_t n, std::size_t m,
                        const SeedChainOptions& options = {});

/// Number of raw blocks seed_chain() will draw.
std::size_t seed_chain_block_count(std::size_t n, std::size_t m, const SeedChainOptions& options = {});

}  // namespace triqrng
