#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "triqrng/config.hpp"

namespace triqrng {

struct StageTiming {
  std::string name;
  double items_per_s = 0.0;
  std::string item;  // what one item is
};

/// Desk-scale throughput. Rates are wall clock with one warmup call excluded
/// per measurement; raw rates count both channels.
struct BenchReport {
  double seconds = 0.0;
  unsigned hardware_concurrency = 0;
  bool pclmul = false;
  double raw_samples_per_s = 0.0;
  double raw_bits_per_s = 0.0;
  double uniform_bits_per_s = 0.0;
  double uniform_to_raw_ratio = 0.0;  // uniform bits per consumed raw bit
  double gaussian_values_per_s = 0.0;
  double toeplitz_fast_blocks_per_s = 0.0;
  double toeplitz_naive_blocks_per_s = 0.0;
  double blocks_per_s_1_thread = 0.0;
  double blocks_per_s_4_threads = 0.0;
  double thread_speedup = 0.0;
  std::vector<StageTiming> stages;

  nlohmann::json to_json() const;
};

/// Spends roughly `seconds` in total across the measurements.
BenchReport run_bench(const PipelineConfig& config, double seconds);

}  // namespace triqrng
