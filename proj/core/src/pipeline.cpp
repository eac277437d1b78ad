#include "triqrng/pipeline.hpp"

#include <algorithm>
#include <filesystem>
#include <stdexcept>
#include <thread>

#include "triqrng/dodis.hpp"
#include "triqrng/errors.hpp"
#include "triqrng/rayleigh.hpp"

namespace triqrng {

namespace {

constexpr std::size_t kChunkTicks = 512;
constexpr std::uint32_t kLiveStream = 0;
constexpr std::uint32_t kDarkStream = 1;

bool covers(const EntropyReport& r, std::size_t block_m) { return r.extractable_bits >= block_m; }

}  // namespace

OutputType parse_output_type(const std::string& name) {
  if (name == "uniform") return OutputType::uniform;
  if (name == "gaussian") return OutputType::gaussian;
  if (name == "rayleigh") return OutputType::rayleigh;
  throw std::invalid_argument("unknown output type '" + name + "' (expected uniform, gaussian or rayleigh)");
}

std::string to_string(OutputType t) {
  switch (t) {
    case OutputType::uniform: return "uniform";
    case OutputType::gaussian: return "gaussian";
    case OutputType::rayleigh: return "rayleigh";
  }
  return "unknown";
}

std::vector<BitBlock> extract_blocks(const ToeplitzExtractor& extractor, std::span<const BitBlock> inputs,
                                     std::size_t workers) {
  std::vector<BitBlock> out(inputs.size());
  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t b = begin; b < end; ++b) out[b] = extractor.extract(inputs[b]);
  };
  workers = std::max<std::size_t>(1, std::min(workers, inputs.size()));
  if (workers == 1) {
    work(0, inputs.size());
    return out;
  }
  const std::size_t per = (inputs.size() + workers - 1) / workers;
  {
    std::vector<std::jthread> threads;
    threads.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      const std::size_t begin = w * per;
      const std::size_t end = std::min(inputs.size(), begin + per);
      if (begin < end) threads.emplace_back(work, begin, end);
    }
  }  // joined here, before `out` is returned
  return out;
}

Pipeline::Pipeline(PipelineConfig config)
    : config_(std::move(config)),
      samples_per_tick_(0),
      source_((config_.validate(), config_.source), config_.prng_seed, kLiveStream, config_.sample_rate_hz),
      quantizer_(config_.adc),
      matrix_(config_.extraction.gaussian.recursive_matrix()),
      smoother_(config_.extraction.sg_window, config_.extraction.sg_order) {
  samples_per_tick_ = config_.extraction.block_n / static_cast<std::size_t>(config_.adc.bits);
  if (config_.extraction.sg_window > samples_per_tick_)
    throw ConfigError("sg_window must not exceed the samples per block (" + std::to_string(samples_per_tick_) + ")");

  const std::size_t n_cert = config_.certification.samples;
  {
    QuadratureSource dark(config_.source.at_lo_power(0.0), config_.prng_seed, kDarkStream, config_.sample_rate_hz,
                          true);
    const auto frame = dark.next(n_cert);
    dark_i_ = quantizer_.quantize(frame.i).codes;
    dark_q_ = quantizer_.quantize(frame.q).codes;
  }
  {
    const auto frame = source_.next(n_cert);
    history_i_ = quantizer_.quantize(frame.i).codes;
    history_q_ = quantizer_.quantize(frame.q).codes;
    counters_.calibration_samples += n_cert;
  }
  certify(0);
  const auto& first = log_.back();
  if (!first.error.empty()) throw StartupError("startup certification failed: " + first.error);
  for (const EntropyReport* r : {&first.i, &first.q}) {
    if (!covers(*r, config_.extraction.block_m))
      throw StartupError("channel " + r->channel + ": block_m = " + std::to_string(config_.extraction.block_m) +
                         " exceeds extractable_length(" + std::to_string(config_.extraction.block_n) + ", h = " +
                         std::to_string(r->h_min_per_bit) + ", eps = " + std::to_string(r->epsilon) +
                         ") = " + std::to_string(r->extractable_bits));
  }

  const auto& cache = config_.extraction.seed_cache_path;
  if (!cache.empty() && std::filesystem::exists(cache)) {
    auto seed = ToeplitzSeed::load(cache);
    if (seed.n() != config_.extraction.block_n || seed.m() != config_.extraction.block_m)
      throw StartupError("cached seed " + cache + " is for " + std::to_string(seed.n()) + " -> " +
                         std::to_string(seed.m()) + ", config wants " + std::to_string(config_.extraction.block_n) +
                         " -> " + std::to_string(config_.extraction.block_m));
    extractor_.emplace(std::move(seed));
  } else {
    extractor_.emplace(derive_seed());
    if (!cache.empty()) extractor_->seed().save(cache);
  }
  next_certification_ = config_.certification.recertify_every;
}

ToeplitzSeed Pipeline::derive_seed() {
  const auto& x = config_.extraction;
  const std::size_t dodis_n = next_admissible_prime(x.dodis.chunk_bits);
  const auto bits = static_cast<std::size_t>(config_.adc.bits);
  const std::size_t samples = (dodis_n + bits - 1) / bits;
  std::optional<BitBlock> pending_q;
  const BitBlockStream stream = [&]() -> std::optional<BitBlock> {
    if (pending_q) {
      auto b = std::move(*pending_q);
      pending_q.reset();
      return b;
    }
    const auto frame = source_.next(samples);
    counters_.calibration_samples += samples;
    pending_q = pack_codes(quantizer_.quantize(frame.q).codes, config_.adc.bits);
    return pack_codes(quantizer_.quantize(frame.i).codes, config_.adc.bits);
  };
  return seed_chain(stream, x.block_n, x.block_m, x.dodis);
}

void Pipeline::certify(std::uint64_t tick) {
  CertifyOptions opts;
  opts.prediction_order = config_.certification.prediction_order;
  opts.psd_segment = config_.certification.psd_segment;
  opts.epsilon = config_.extraction.epsilon;
  opts.block_n = config_.extraction.block_n;
  opts.sample_rate_hz = config_.sample_rate_hz;

  auto in_time_order = [&](const std::vector<std::int32_t>& ring) {
    CodeBlock b;
    b.spec = config_.adc;
    b.codes.reserve(ring.size());
    b.codes.insert(b.codes.end(), ring.begin() + static_cast<std::ptrdiff_t>(history_pos_), ring.end());
    b.codes.insert(b.codes.end(), ring.begin(), ring.begin() + static_cast<std::ptrdiff_t>(history_pos_));
    return b;
  };
  auto dark_block = [&](const std::vector<std::int32_t>& codes) { return CodeBlock{codes, config_.adc, 0}; };

  CertificationEvent ev;
  ev.tick = tick;
  try {
    ev.i = certify_channel(in_time_order(history_i_), dark_block(dark_i_), opts);
    ev.q = certify_channel(in_time_order(history_q_), dark_block(dark_q_), opts);
  } catch (const std::exception& e) {
    ev.error = e.what();
  }
  ev.i.channel = "I";
  ev.q.channel = "Q";
  ev.certified_i = ev.error.empty() && covers(ev.i, config_.extraction.block_m);
  ev.certified_q = ev.error.empty() && covers(ev.q, config_.extraction.block_m);

  std::lock_guard lock(state_mutex_);
  ev.epoch = log_.size();
  log_.push_back(ev);
  ++counters_.certifications;
}

void Pipeline::push_history(std::span<const std::int32_t> ci, std::span<const std::int32_t> cq) {
  const std::size_t cap = history_i_.size();
  std::size_t start = ci.size() > cap ? ci.size() - cap : 0;
  for (std::size_t t = start; t < ci.size(); ++t) {
    history_i_[history_pos_] = ci[t];
    history_q_[history_pos_] = cq[t];
    history_pos_ = (history_pos_ + 1) % cap;
  }
}

void Pipeline::run(std::size_t ticks, unsigned selection, OutputSink& sink) {
  std::vector<double> vi, vq;
  std::size_t remaining = ticks;
  while (remaining > 0) {
    if (tick_ == next_certification_) {
      certify(tick_);
      next_certification_ += config_.certification.recertify_every;
      sink.on_certification(latest_certification());
    }
    const std::size_t chunk =
        std::min<std::size_t>({remaining, kChunkTicks, static_cast<std::size_t>(next_certification_ - tick_)});
    const std::size_t n = chunk * samples_per_tick_;
    vi.resize(n);
    vq.resize(n);
    source_.next_into(vi, vq);
    const auto ci = quantizer_.quantize(vi).codes;
    const auto cq = quantizer_.quantize(vq).codes;
    push_history(ci, cq);
    {
      std::lock_guard lock(state_mutex_);
      counters_.ticks += chunk;
      counters_.samples_consumed += n;
    }
    if (selection & mask(OutputType::uniform)) emit_uniform(ci, cq, chunk, sink);
    if (selection & mask(OutputType::gaussian)) emit_gaussian(ci, cq, sink);
    if (selection & mask(OutputType::rayleigh)) emit_rayleigh(ci, cq, sink);
    tick_ += chunk;
    remaining -= chunk;
  }
}

void Pipeline::emit_uniform(std::span<const std::int32_t> ci, std::span<const std::int32_t> cq, std::size_t ticks,
                            OutputSink& sink) {
  const auto cert = latest_certification();
  const bool ok[2] = {cert.certified_i, cert.certified_q};
  std::vector<BitBlock> inputs;
  std::vector<int> channel;
  std::vector<std::uint64_t> tick;
  std::size_t discarded = 0;
  for (std::size_t t = 0; t < ticks; ++t) {
    for (int ch = 0; ch < 2; ++ch) {
      if (!ok[ch]) {
        ++discarded;
        continue;
      }
      const auto codes = (ch == 0 ? ci : cq).subspan(t * samples_per_tick_, samples_per_tick_);
      inputs.push_back(pack_codes(codes, config_.adc.bits));
      channel.push_back(ch);
      tick.push_back(tick_ + t);
    }
  }
  const auto outputs = extract_blocks(*extractor_, inputs, config_.extraction.workers);
  {
    std::lock_guard lock(state_mutex_);
    counters_.uniform_blocks += outputs.size();
    counters_.uniform_bits += outputs.size() * config_.extraction.block_m;
    counters_.uniform_discarded_blocks += discarded;
  }
  for (std::size_t b = 0; b < outputs.size(); ++b) sink.on_uniform({outputs[b], channel[b], tick[b], cert.epoch});
}

void Pipeline::emit_gaussian(std::span<const std::int32_t> ci, std::span<const std::int32_t> cq, OutputSink& sink) {
  const auto cert = latest_certification();
  const auto& opts = config_.extraction.gaussian;
  for (int ch = 0; ch < 2; ++ch) {
    auto& acc = (ch == 0 ? pool_i_ : pool_q_).codes;
    const auto fresh = ch == 0 ? ci : cq;
    acc.insert(acc.end(), fresh.begin(), fresh.end());
    while (acc.size() >= opts.pool_size) {
      CodeBlock pool{{acc.begin(), acc.begin() + static_cast<std::ptrdiff_t>(opts.pool_size)}, config_.adc, 0};
      acc.erase(acc.begin(), acc.begin() + static_cast<std::ptrdiff_t>(opts.pool_size));
      const EntropyReport& rep = ch == 0 ? cert.i : cert.q;
      const bool ok = ch == 0 ? cert.certified_i : cert.certified_q;
      if (!ok || !(rep.h_min_per_bit > 0.0)) {
        std::lock_guard lock(state_mutex_);
        ++counters_.gaussian_discarded_pools;
        continue;
      }
      const int m_bits = choose_msb_bits(std::min(rep.h_min_per_bit, 1.0), config_.adc.bits);
      const int passes = ch == 0 ? opts.passes_i : opts.passes_q;
      const auto res = extract_gaussian_channel(pool, m_bits, passes, opts);
      GaussianBatch batch{ch, res.codes, res.n_out, res.step, res.passes, res.ks, res.chi2, cert.epoch};
      {
        std::lock_guard lock(state_mutex_);
        ++counters_.gaussian_pools;
        counters_.gaussian_values += batch.codes.size();
      }
      sink.on_gaussian(batch);
    }
  }
}

void Pipeline::emit_rayleigh(std::span<const std::int32_t> ci, std::span<const std::int32_t> cq, OutputSink& sink) {
  std::vector<double> vi(ci.size()), vq(cq.size());
  for (std::size_t t = 0; t < ci.size(); ++t) {
    vi[t] = quantizer_.dequantize(ci[t]);
    vq[t] = quantizer_.dequantize(cq[t]);
  }
  RayleighBatch batch{smoother_.apply(rayleigh_raw(vi, vq)), tick_};
  {
    std::lock_guard lock(state_mutex_);
    counters_.rayleigh_values += batch.values.size();
  }
  sink.on_rayleigh(batch);
}

PipelineCounters Pipeline::counters() const {
  std::lock_guard lock(state_mutex_);
  return counters_;
}

std::vector<CertificationEvent> Pipeline::certification_log() const {
  std::lock_guard lock(state_mutex_);
  return log_;
}

CertificationEvent Pipeline::latest_certification() const {
  std::lock_guard lock(state_mutex_);
  return log_.back();
}

BitBlock PipelineRun::uniform_bits() const {
  BitBlock out;
  for (const auto& b : uniform) out.append(b.bits);
  return out;
}

PipelineRun run_pipeline(const PipelineConfig& config, std::size_t duration_blocks, unsigned selection) {
  struct Collector : OutputSink {
    PipelineRun* run;
    void on_uniform(const UniformBlock& b) override { run->uniform.push_back(b); }
    void on_gaussian(const GaussianBatch& b) override { run->gaussian.push_back(b); }
    void on_rayleigh(const RayleighBatch& b) override { run->rayleigh.push_back(b); }
  };
  PipelineRun result;
  Pipeline pipeline(config);
  Collector sink;
  sink.run = &result;
  pipeline.run(duration_blocks, selection, sink);
  result.log = pipeline.certification_log();
  result.counters = pipeline.counters();
  return result;
}

}  // namespace triqrng
