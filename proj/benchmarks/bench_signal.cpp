#include <benchmark/benchmark.h>

#include "triqrng/adc.hpp"
#include "triqrng/bitblock.hpp"
#include "triqrng/gaussian.hpp"
#include "triqrng/savgol.hpp"
#include "triqrng/source.hpp"

using namespace triqrng;

namespace {

void simulate(benchmark::State& state) {
  QuadratureSource src(NoiseModel::paper_like(), 1);
  std::vector<double> i(static_cast<std::size_t>(state.range(0))), q(i.size());
  for (auto _ : state) {
    src.next_into(i, q);
    benchmark::DoNotOptimize(i.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0) * 2);
}
BENCHMARK(simulate)->Arg(1 << 16);

void quantize_dnl(benchmark::State& state) {
  const Quantizer qz(AdcSpec::paper_like());
  const auto f = simulate_quadratures(NoiseModel::paper_like(), 1 << 16, 2);
  for (auto _ : state) benchmark::DoNotOptimize(qz.quantize(f.i));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(f.i.size()));
}
BENCHMARK(quantize_dnl);

void pack(benchmark::State& state) {
  std::vector<std::int32_t> codes(96);
  for (std::size_t t = 0; t < codes.size(); ++t) codes[t] = static_cast<std::int32_t>(t * 677) - 32768;
  for (auto _ : state) benchmark::DoNotOptimize(pack_codes(codes, 16));
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(pack);

void wallace(benchmark::State& state) {
  const auto f = simulate_quadratures(NoiseModel::paper_like(), 65536, 3);
  auto pool = normalize_pool(f.i, 4);
  const auto h = RecursiveMatrix::hadamard(4);
  for (auto _ : state) wallace_pass(pool, h);
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(pool.values.size()));
}
BENCHMARK(wallace);

void savgol(benchmark::State& state) {
  const auto f = simulate_quadratures(NoiseModel::paper_like(), 1 << 16, 4);
  const SavitzkyGolay sg(31, 3);
  for (auto _ : state) benchmark::DoNotOptimize(sg.apply(f.i));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(f.i.size()));
}
BENCHMARK(savgol);

}  // namespace
