#include "triqrng/bench.hpp"

#include <chrono>
#include <stdexcept>
#include <thread>

#include "triqrng/gf2.hpp"
#include "triqrng/pipeline.hpp"
#include "triqrng/rayleigh.hpp"
#include "triqrng/savgol.hpp"

namespace triqrng {

namespace {

using Clock = std::chrono::steady_clock;

// Calls fn (which returns the number of items it processed) until `budget`
// seconds have passed; the first call is warmup.
template <typename Fn>
double rate(double budget, Fn&& fn) {
  (void)fn();
  double items = 0.0;
  const auto start = Clock::now();
  double elapsed = 0.0;
  do {
    items += static_cast<double>(fn());
    elapsed = std::chrono::duration<double>(Clock::now() - start).count();
  } while (elapsed < budget);
  return items / elapsed;
}

struct NullSink : OutputSink {};

}  // namespace

nlohmann::json BenchReport::to_json() const {
  nlohmann::json stage_list = nlohmann::json::array();
  for (const auto& s : stages) stage_list.push_back({{"name", s.name}, {"items_per_s", s.items_per_s}, {"item", s.item}});
  return {{"seconds", seconds},
          {"hardware_concurrency", hardware_concurrency},
          {"pclmul", pclmul},
          {"raw_samples_per_s", raw_samples_per_s},
          {"raw_bits_per_s", raw_bits_per_s},
          {"uniform_bits_per_s", uniform_bits_per_s},
          {"uniform_to_raw_ratio", uniform_to_raw_ratio},
          {"gaussian_values_per_s", gaussian_values_per_s},
          {"toeplitz_fast_blocks_per_s", toeplitz_fast_blocks_per_s},
          {"toeplitz_naive_blocks_per_s", toeplitz_naive_blocks_per_s},
          {"blocks_per_s_1_thread", blocks_per_s_1_thread},
          {"blocks_per_s_4_threads", blocks_per_s_4_threads},
          {"thread_speedup", thread_speedup},
          {"stages", stage_list}};
}

BenchReport run_bench(const PipelineConfig& config, double seconds) {
  if (!(seconds > 0.0)) throw std::invalid_argument("bench duration must be positive");
  BenchReport rep;
  rep.seconds = seconds;
  rep.hardware_concurrency = std::thread::hardware_concurrency();
  rep.pclmul = gf2::has_pclmul();
  const double slice = seconds / 8.0;

  // End-to-end uniform path. Startup (calibration, seed) is excluded.
  {
    Pipeline p(config);
    NullSink sink;
    p.run(64, mask(OutputType::uniform), sink);
    const auto before = p.counters();
    const auto start = Clock::now();
    double elapsed = 0.0;
    do {
      p.run(256, mask(OutputType::uniform), sink);
      elapsed = std::chrono::duration<double>(Clock::now() - start).count();
    } while (elapsed < 2.0 * slice);
    const auto after = p.counters();
    const double samples = 2.0 * static_cast<double>(after.samples_consumed - before.samples_consumed);
    rep.raw_samples_per_s = samples / elapsed;
    rep.raw_bits_per_s = rep.raw_samples_per_s * config.adc.bits;
    rep.uniform_bits_per_s = static_cast<double>(after.uniform_bits - before.uniform_bits) / elapsed;
    rep.uniform_to_raw_ratio = rep.uniform_bits_per_s / rep.raw_bits_per_s;
  }

  // End-to-end Gaussian path.
  {
    Pipeline p(config);
    NullSink sink;
    const std::size_t pool_ticks = config.extraction.gaussian.pool_size / p.samples_per_tick() + 1;
    rep.gaussian_values_per_s = rate(2.0 * slice, [&] {
      const auto before = p.counters().gaussian_values;
      p.run(pool_ticks, mask(OutputType::gaussian), sink);
      return p.counters().gaussian_values - before;
    });
  }

  const std::size_t n = config.extraction.block_n, m = config.extraction.block_m;
  const auto seed = ToeplitzSeed::random(n, m, 99);
  const ToeplitzExtractor extractor(seed);
  std::vector<BitBlock> inputs;
  for (std::uint64_t b = 0; b < 256; ++b) inputs.push_back(ToeplitzSeed::random(n, 1, 1000 + b).bits());

  rep.toeplitz_fast_blocks_per_s = rate(slice / 2.0, [&] {
    for (const auto& in : inputs) (void)toeplitz_extract_fast(in, seed, m);
    return inputs.size();
  });
  rep.toeplitz_naive_blocks_per_s = rate(slice / 2.0, [&] {
    (void)toeplitz_extract(inputs[0], seed, m);
    return 1;
  });
  rep.blocks_per_s_1_thread = rate(slice / 2.0, [&] { return extract_blocks(extractor, inputs, 1).size(); });
  rep.blocks_per_s_4_threads = rate(slice / 2.0, [&] { return extract_blocks(extractor, inputs, 4).size(); });
  rep.thread_speedup = rep.blocks_per_s_4_threads / rep.blocks_per_s_1_thread;

  // Per-stage rates.
  const std::size_t chunk = 1 << 16;
  QuadratureSource src(config.source, config.prng_seed);
  std::vector<double> vi(chunk), vq(chunk);
  rep.stages.push_back({"simulate", rate(slice / 4.0, [&] {
                          src.next_into(vi, vq);
                          return 2 * chunk;
                        }), "sample"});
  const Quantizer qz(config.adc);
  std::vector<std::int32_t> codes;
  rep.stages.push_back({"quantize", rate(slice / 4.0, [&] {
                          codes = qz.quantize(vi).codes;
                          return chunk;
                        }), "sample"});
  const std::size_t spt = n / static_cast<std::size_t>(config.adc.bits);
  rep.stages.push_back({"pack", rate(slice / 4.0, [&] {
                          std::size_t blocks = 0;
                          for (std::size_t t = 0; t + spt <= chunk; t += spt, ++blocks)
                            (void)pack_codes(std::span(codes).subspan(t, spt), config.adc.bits);
                          return blocks;
                        }), "block"});
  rep.stages.push_back({"toeplitz_fast", rep.toeplitz_fast_blocks_per_s, "block"});
  const auto matrix = config.extraction.gaussian.recursive_matrix();
  const std::size_t pool_size = config.extraction.gaussian.pool_size;
  std::vector<double> raw(pool_size);
  for (std::size_t t = 0; t < pool_size; ++t) raw[t] = vi[t % chunk];
  auto pool = normalize_pool(raw, config.extraction.gaussian.k);
  rep.stages.push_back({"wallace_pass", rate(slice / 4.0, [&] {
                          wallace_pass(pool, matrix);
                          return pool_size;
                        }), "value"});
  const SavitzkyGolay sg(config.extraction.sg_window, config.extraction.sg_order);
  const auto r = rayleigh_raw(vi, vq);
  rep.stages.push_back({"savitzky_golay", rate(slice / 4.0, [&] {
                          (void)sg.apply(r);
                          return chunk;
                        }), "value"});
  return rep;
}

}  // namespace triqrng
