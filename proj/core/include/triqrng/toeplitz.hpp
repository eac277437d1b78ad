#pragma once

#include <cstdint>
#include <filesystem>

#include "triqrng/bitblock.hpp"

namespace triqrng {

/// Seed of an m x n binary Toeplitz matrix, n + m - 1 bits s[0..n+m-2].
///
/// Convention: T[i][j] = s[n - 1 + i - j] for output row i < m and input
/// column j < n. The first row is therefore s[n-1], s[n-2], ..., s[0] and the
/// first column (top to bottom) is s[n-1], s[n], ..., s[n+m-2]. Equivalently,
/// output bit i is the coefficient of t^(n-1+i) in s(t) * x(t), which is what
/// the fast path computes.
///
/// Golden vector: s = 10110 (s[0] first), n = 4, m = 2 gives rows 1101 and
/// 0110; input 1100 maps to 01.
class ToeplitzSeed {
 public:
  ToeplitzSeed(BitBlock bits, std::size_t n, std::size_t m);

  /// Uniform seed from a PRNG; for tests and benchmarks only.
  static ToeplitzSeed random(std::size_t n, std::size_t m, std::uint64_t prng_seed);

  /// Binary layout: u32 LE n, u32 LE m, then the packed seed bits MSB-first.
  void save(const std::filesystem::path& path) const;
  static ToeplitzSeed load(const std::filesystem::path& path);

  const BitBlock& bits() const { return bits_; }
  std::size_t n() const { return n_; }
  std::size_t m() const { return m_; }
  bool entry(std::size_t row, std::size_t col) const { return bits_.get(n_ - 1 + row - col); }

  friend bool operator==(const ToeplitzSeed&, const ToeplitzSeed&) = default;

 private:
  BitBlock bits_;
  std::size_t n_;
  std::size_t m_;
};

/// Reference path: explicit row-by-row parity over the matrix entries.
BitBlock toeplitz_extract(const BitBlock& input, const ToeplitzSeed& seed, std::size_t m);

/// Same contract, computed as a carryless polynomial product.
BitBlock toeplitz_extract_fast(const BitBlock& input, const ToeplitzSeed& seed, std::size_t m);

/// Holds an immutable seed and extracts blocks with the fast path. Safe to
/// share across threads.
class ToeplitzExtractor {
 public:
  explicit ToeplitzExtractor(ToeplitzSeed seed) : seed_(std::move(seed)) {}

  BitBlock extract(const BitBlock& input) const { return toeplitz_extract_fast(input, seed_, seed_.m()); }
  const ToeplitzSeed& seed() const { return seed_; }
  std::size_t n() const { return seed_.n(); }
  std::size_t m() const { return seed_.m(); }

 private:
  ToeplitzSeed seed_;
};

}  // namespace triqrng
