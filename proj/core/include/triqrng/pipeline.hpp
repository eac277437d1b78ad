#pragma once

#include <cstdint>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "triqrng/adc.hpp"
#include "triqrng/config.hpp"
#include "triqrng/entropy.hpp"
#include "triqrng/gaussian.hpp"
#include "triqrng/savgol.hpp"
#include "triqrng/source.hpp"
#include "triqrng/toeplitz.hpp"

namespace triqrng {

enum class OutputType : unsigned { uniform = 1, gaussian = 2, rayleigh = 4 };
inline constexpr unsigned kAllOutputs = 7;
inline constexpr unsigned mask(OutputType t) { return static_cast<unsigned>(t); }
OutputType parse_output_type(const std::string& name);
std::string to_string(OutputType t);

/// One Toeplitz output block. Channel 0 is I, 1 is Q.
struct UniformBlock {
  BitBlock bits;
  int channel = 0;
  std::uint64_t tick = 0;
  std::uint64_t cert_epoch = 0;
};

/// One extracted Gaussian pool, already requantized.
struct GaussianBatch {
  int channel = 0;
  std::vector<std::int32_t> codes;
  int n_out = 0;
  double step = 0.0;  // output LSB in standard deviations
  int passes = 0;
  GofReport ks;
  GofReport chi2;
  std::uint64_t cert_epoch = 0;

  bool passed() const { return ks.pass && chi2.pass; }
};

/// Smoothed amplitudes in volts. Never certified.
struct RayleighBatch {
  std::vector<double> values;
  std::uint64_t first_tick = 0;
};

struct CertificationEvent {
  std::uint64_t epoch = 0;
  std::uint64_t tick = 0;  // first tick the certification covers
  EntropyReport i;
  EntropyReport q;
  bool certified_i = false;
  bool certified_q = false;
  std::string error;  // set when the estimate itself failed
};

struct PipelineCounters {
  std::uint64_t ticks = 0;
  std::uint64_t samples_consumed = 0;     // per channel, after startup
  std::uint64_t calibration_samples = 0;  // per channel, startup certification and seed derivation
  std::uint64_t uniform_blocks = 0;
  std::uint64_t uniform_bits = 0;
  std::uint64_t uniform_discarded_blocks = 0;  // produced while the channel was uncertified
  std::uint64_t gaussian_pools = 0;
  std::uint64_t gaussian_values = 0;
  std::uint64_t gaussian_discarded_pools = 0;
  std::uint64_t rayleigh_values = 0;
  std::uint64_t certifications = 0;
};

class OutputSink {
 public:
  virtual ~OutputSink() = default;
  virtual void on_uniform(const UniformBlock&) {}
  virtual void on_gaussian(const GaussianBatch&) {}
  virtual void on_rayleigh(const RayleighBatch&) {}
  virtual void on_certification(const CertificationEvent&) {}
};

/// Streaming source -> ADC -> certification -> extractors.
///
/// The unit of progress is a tick: block_n / adc_bits samples on each channel,
/// i.e. one Toeplitz input block per channel. Every tick consumes the same
/// number of samples whatever outputs are selected, so switching the output
/// type never changes the raw sample rate.
///
/// Construction performs startup: a dark (LO blocked) calibration record,
/// a first certification from live samples, the block-geometry check
/// (StartupError if block_m exceeds the extractable length on either
/// channel) and the Toeplitz seed (loaded from seed_cache_path if present,
/// otherwise derived through the Dodis chain from live raw blocks, I and Q
/// alternately, and cached when a path is configured).
///
/// Uniform output interleaves I and Q blocks per tick (I first). A channel
/// whose latest certification does not cover block_m has its blocks
/// discarded and counted until a later certification succeeds.
///
/// run() must be called from one thread at a time; counters(), the
/// certification log and latest_certification() may be read concurrently.
class Pipeline {
 public:
  explicit Pipeline(PipelineConfig config);

  void run(std::size_t ticks, unsigned selection, OutputSink& sink);

  std::size_t samples_per_tick() const { return samples_per_tick_; }
  const PipelineConfig& config() const { return config_; }
  const ToeplitzSeed& seed() const { return extractor_->seed(); }

  PipelineCounters counters() const;
  std::vector<CertificationEvent> certification_log() const;
  CertificationEvent latest_certification() const;

 private:
  struct GaussianAccumulator {
    std::vector<std::int32_t> codes;
  };

  void certify(std::uint64_t tick);
  void push_history(std::span<const std::int32_t> ci, std::span<const std::int32_t> cq);
  ToeplitzSeed derive_seed();
  void emit_uniform(std::span<const std::int32_t> ci, std::span<const std::int32_t> cq, std::size_t ticks,
                    OutputSink& sink);
  void emit_gaussian(std::span<const std::int32_t> ci, std::span<const std::int32_t> cq, OutputSink& sink);
  void emit_rayleigh(std::span<const std::int32_t> ci, std::span<const std::int32_t> cq, OutputSink& sink);

  PipelineConfig config_;
  std::size_t samples_per_tick_;
  QuadratureSource source_;
  Quantizer quantizer_;
  std::vector<std::int32_t> dark_i_;
  std::vector<std::int32_t> dark_q_;
  std::vector<std::int32_t> history_i_;  // ring buffer of the last certification.samples codes
  std::vector<std::int32_t> history_q_;
  std::size_t history_pos_ = 0;
  std::optional<ToeplitzExtractor> extractor_;
  RecursiveMatrix matrix_;
  SavitzkyGolay smoother_;
  GaussianAccumulator pool_i_;
  GaussianAccumulator pool_q_;
  std::uint64_t tick_ = 0;
  std::uint64_t next_certification_ = 0;

  mutable std::mutex state_mutex_;
  PipelineCounters counters_;
  std::vector<CertificationEvent> log_;
};

/// Extracts every input block with the seed, splitting the range across
/// `workers` threads. Output order matches input order.
std::vector<BitBlock> extract_blocks(const ToeplitzExtractor& extractor, std::span<const BitBlock> inputs,
                                     std::size_t workers);

/// Collected outputs of a finite run.
struct PipelineRun {
  std::vector<UniformBlock> uniform;
  std::vector<GaussianBatch> gaussian;
  std::vector<RayleighBatch> rayleigh;
  std::vector<CertificationEvent> log;
  PipelineCounters counters;

  /// Concatenated uniform blocks in emission order.
  BitBlock uniform_bits() const;
};

/// Starts a pipeline and runs `duration_blocks` ticks with the given outputs.
PipelineRun run_pipeline(const PipelineConfig& config, std::size_t duration_blocks, unsigned selection = kAllOutputs);

}  // namespace triqrng
