#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "triqrng/adc.hpp"
#include "triqrng/dodis.hpp"
#include "triqrng/gaussian.hpp"
#include "triqrng/source.hpp"

namespace triqrng {

struct ExtractionConfig {
  std::size_t block_n = 1536;
  std::size_t block_m = 1024;
  double epsilon = kDefaultEpsilon;
  std::string seed_cache_path;  // empty: derive the seed at startup, do not persist
  SeedChainOptions dodis;
  GaussianOptions gaussian;
  std::size_t sg_window = 31;
  int sg_order = 3;
  std::size_t workers = 1;  // Toeplitz worker threads
};

struct CertificationConfig {
  int prediction_order = 16;
  std::size_t psd_segment = 128;
  std::size_t samples = std::size_t{1} << 20;  // per channel, per certification
  std::size_t recertify_every = 16384;         // ticks (one Toeplitz block per channel each)
};

struct ServiceConfig {
  std::string listen_address = "127.0.0.1";
  int port = 8080;
  std::size_t max_request_bytes = std::size_t{1} << 20;
  std::size_t buffer_bytes = std::size_t{8} << 20;  // per output type
  std::size_t test_block_bits = std::size_t{1} << 20;
  int request_timeout_ms = 2000;
  double alpha = 0.01;
};

/// Everything the pipeline, CLI and service read from one INI file:
///
///   [source] sigma_q2 sigma_e2 sigma_e2_q filter_taps lo_power_mw
///            responsivity saturation_v prng_seed sample_rate_hz
///   [adc] bits range_v dnl_max dnl_seed
///   [extraction] block_n block_m epsilon seed_cache_path dodis_chunk_bits
///                dodis_output_bits k pool_size passes_i passes_q
///                auto_passes matrix output_grid_sigma alpha sg_window
///                sg_order workers
///   [certification] prediction_order psd_segment samples recertify_every
///   [service] listen_address port max_request_bytes buffer_bytes
///             test_block_bits request_timeout_ms alpha
///
/// Lists (filter_taps, matrix) are comma separated. Missing keys keep the
/// paper-like defaults; unknown sections or keys are errors.
struct PipelineConfig {
  NoiseModel source = NoiseModel::paper_like();
  std::uint64_t prng_seed = 1;
  double sample_rate_hz = kDefaultSampleRateHz;
  AdcSpec adc = AdcSpec::paper_like();
  ExtractionConfig extraction;
  CertificationConfig certification;
  ServiceConfig service;

  /// Static checks only; the entropy-dependent geometry check runs at
  /// pipeline startup. Throws ConfigError.
  void validate() const;

  static PipelineConfig paper_like();
  static PipelineConfig quiet();
};

PipelineConfig parse_config(const std::string& ini_text);
PipelineConfig load_config(const std::filesystem::path& path);

}  // namespace triqrng
