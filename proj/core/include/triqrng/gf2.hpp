#pragma once

#include <cstdint>
#include <span>
#include <vector>

// Polynomial arithmetic over GF(2) on packed 64-bit words (bit i of word w is
// the coefficient of t^(64w + i)).
namespace triqrng::gf2 {

struct Product128 {
  std::uint64_t lo = 0;
  std::uint64_t hi = 0;
};

/// Carryless 64x64 -> 128 multiply, portable shift-and-xor version.
Product128 clmul64_portable(std::uint64_t a, std::uint64_t b);

/// True when the CPU has PCLMULQDQ and the fast kernels will use it.
bool has_pclmul();

/// Full product a(t) * b(t). The result has a.size() + b.size() words.
std::vector<std::uint64_t> multiply(std::span<const std::uint64_t> a, std::span<const std::uint64_t> b);
/// Same, never using PCLMULQDQ. Used as a cross-check and on other targets.
std::vector<std::uint64_t> multiply_portable(std::span<const std::uint64_t> a, std::span<const std::uint64_t> b);

}  // namespace triqrng::gf2
