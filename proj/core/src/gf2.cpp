#include "triqrng/gf2.hpp"

#if defined(__x86_64__) || defined(__i386__)
#include <immintrin.h>
#define TRIQRNG_X86 1
#endif

namespace triqrng::gf2 {

Product128 clmul64_portable(std::uint64_t a, std::uint64_t b) {
  // 4-bit windowed table: 16 multiples of a, each up to 67 bits.
  std::uint64_t tlo[16];
  std::uint64_t thi[16];
  tlo[0] = thi[0] = 0;
  for (unsigned i = 1; i < 16; ++i) {
    tlo[i] = thi[i] = 0;
    for (unsigned k = 0; k < 4; ++k) {
      if ((i >> k) & 1U) {
        tlo[i] ^= a << k;
        thi[i] ^= k == 0 ? 0 : a >> (64 - k);
      }
    }
  }
  Product128 r;
  for (int shift = 60; shift >= 0; shift -= 4) {
    // r <<= 4
    r.hi = (r.hi << 4) | (r.lo >> 60);
    r.lo <<= 4;
    const unsigned nib = static_cast<unsigned>(b >> shift) & 15U;
    r.lo ^= tlo[nib];
    r.hi ^= thi[nib];
  }
  return r;
}

namespace {

std::vector<std::uint64_t> multiply_with_portable(std::span<const std::uint64_t> a,
                                                  std::span<const std::uint64_t> b) {
  std::vector<std::uint64_t> r(a.size() + b.size(), 0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0) continue;
    for (std::size_t j = 0; j < b.size(); ++j) {
      const Product128 p = clmul64_portable(a[i], b[j]);
      r[i + j] ^= p.lo;
      r[i + j + 1] ^= p.hi;
    }
  }
  return r;
}

#ifdef TRIQRNG_X86
__attribute__((target("pclmul,sse4.1"))) std::vector<std::uint64_t> multiply_with_pclmul(
    std::span<const std::uint64_t> a, std::span<const std::uint64_t> b) {
  std::vector<std::uint64_t> r(a.size() + b.size(), 0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0) continue;
    const __m128i va = _mm_cvtsi64_si128(static_cast<long long>(a[i]));
    for (std::size_t j = 0; j < b.size(); ++j) {
      const __m128i vb = _mm_cvtsi64_si128(static_cast<long long>(b[j]));
      const __m128i p = _mm_clmulepi64_si128(va, vb, 0x00);
      r[i + j] ^= static_cast<std::uint64_t>(_mm_cvtsi128_si64(p));
      r[i + j + 1] ^= static_cast<std::uint64_t>(_mm_extract_epi64(p, 1));
    }
  }
  return r;
}
#endif

}  // namespace

bool has_pclmul() {
#ifdef TRIQRNG_X86
  static const bool supported = __builtin_cpu_supports("pclmul") && __builtin_cpu_supports("sse4.1");
  return supported;
#else
  return false;
#endif
}

std::vector<std::uint64_t> multiply(std::span<const std::uint64_t> a, std::span<const std::uint64_t> b) {
#ifdef TRIQRNG_X86
  if (has_pclmul()) return multiply_with_pclmul(a, b);
#endif
  return multiply_with_portable(a, b);
}

std::vector<std::uint64_t> multiply_portable(std::span<const std::uint64_t> a, std::span<const std::uint64_t> b) {
  return multiply_with_portable(a, b);
}

}  // namespace triqrng::gf2
