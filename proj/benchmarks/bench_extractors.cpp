#include <benchmark/benchmark.h>

#include <random>

#include "triqrng/dodis.hpp"
#include "triqrng/gf2.hpp"
#include "triqrng/pipeline.hpp"
#include "triqrng/toeplitz.hpp"

using namespace triqrng;

namespace {

BitBlock random_block(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  BitBlock b(n);
  for (std::size_t i = 0; i < n; ++i) b.set(i, rng() & 1U);
  return b;
}

void toeplitz_naive(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0)), m = n * 2 / 3;
  const auto seed = ToeplitzSeed::random(n, m, 1);
  const auto x = random_block(n, 2);
  for (auto _ : state) benchmark::DoNotOptimize(toeplitz_extract(x, seed, m));
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(toeplitz_naive)->Arg(1536);

void toeplitz_fast(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0)), m = n * 2 / 3;
  const ToeplitzExtractor ext(ToeplitzSeed::random(n, m, 1));
  const auto x = random_block(n, 2);
  for (auto _ : state) benchmark::DoNotOptimize(ext.extract(x));
  state.SetItemsProcessed(state.iterations());
  state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(m / 8));
}
BENCHMARK(toeplitz_fast)->Arg(1536)->Arg(6144)->Arg(24576);

void gf2_multiply(benchmark::State& state) {
  const auto words = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(3);
  std::vector<std::uint64_t> a(words), b(words);
  for (auto& x : a) x = rng();
  for (auto& x : b) x = rng();
  const bool portable = state.range(1) != 0;
  for (auto _ : state)
    benchmark::DoNotOptimize(portable ? gf2::multiply_portable(a, b) : gf2::multiply(a, b));
  state.SetLabel(portable ? "portable" : (gf2::has_pclmul() ? "pclmul" : "portable"));
}
BENCHMARK(gf2_multiply)->Args({24, 0})->Args({24, 1});

void extract_blocks_threads(benchmark::State& state) {
  const ToeplitzExtractor ext(ToeplitzSeed::random(1536, 1024, 1));
  const std::vector<BitBlock> in(2048, random_block(1536, 4));
  for (auto _ : state) benchmark::DoNotOptimize(extract_blocks(ext, in, static_cast<std::size_t>(state.range(0))));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(in.size()));
}
BENCHMARK(extract_blocks_threads)->Arg(1)->Arg(2)->Arg(4)->UseRealTime();

void dodis(benchmark::State& state) {
  const auto x = random_block(523, 5), y = random_block(523, 6);
  for (auto _ : state) benchmark::DoNotOptimize(dodis_extract(x, y, 128));
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(dodis);

}  // namespace
