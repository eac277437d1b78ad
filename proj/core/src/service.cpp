#include "triqrng/service.hpp"

#include <httplib.h>

#include <algorithm>
#include <array>
#include <chrono>
#include <condition_variable>
#include <cstdlib>
#include <cstring>
#include <mutex>
#include <thread>

#include "triqrng/io.hpp"
#include "triqrng/json.hpp"
#include "triqrng/pipeline.hpp"
#include "triqrng/rayleigh.hpp"
#include "triqrng/stats.hpp"

namespace triqrng {

namespace {

constexpr std::array<OutputType, 3> kTypes{OutputType::uniform, OutputType::gaussian, OutputType::rayleigh};

std::size_t index_of(OutputType t) {
  switch (t) {
    case OutputType::uniform: return 0;
    case OutputType::gaussian: return 1;
    case OutputType::rayleigh: return 2;
  }
  return 0;
}

std::size_t element_size(OutputType t) {
  switch (t) {
    case OutputType::uniform: return 1;
    case OutputType::gaussian: return 2;
    case OutputType::rayleigh: return 4;
  }
  return 1;
}

// FIFO of bytes; popped regions are never revisited.
class ByteQueue {
 public:
  std::size_t size() const { return buf_.size() - head_; }
  void push(std::span<const std::uint8_t> data) {
    if (head_ > 0 && head_ >= buf_.size() / 2) {
      buf_.erase(buf_.begin(), buf_.begin() + static_cast<std::ptrdiff_t>(head_));
      head_ = 0;
    }
    buf_.insert(buf_.end(), data.begin(), data.end());
  }
  std::string pop(std::size_t n) {
    std::string out(reinterpret_cast<const char*>(buf_.data() + head_), n);
    head_ += n;
    return out;
  }

 private:
  std::vector<std::uint8_t> buf_;
  std::size_t head_ = 0;
};

struct TypeBuffer {
  ByteQueue data;
  std::uint64_t served_bytes = 0;
  std::uint64_t produced_bytes = 0;
};

}  // namespace

struct QrngService::Impl : OutputSink {
  PipelineConfig config;
  ServiceOptions options;
  Pipeline pipeline;

  mutable std::mutex mutex;
  std::condition_variable data_cv;
  std::condition_variable space_cv;
  std::array<TypeBuffer, 3> buffers;
  bool stopping = false;
  std::uint64_t discarded_uniform_buffers = 0;
  std::uint64_t discarded_gaussian_pools = 0;

  // Producer-thread staging, flushed into `buffers` under the lock.
  BitBlock pending_uniform;
  std::vector<std::uint8_t> staged[3];

  httplib::Server server;
  std::thread producer;
  std::thread listener;

  Impl(PipelineConfig c, ServiceOptions o) : config(std::move(c)), options(o), pipeline(config) {}

  double fill(std::size_t idx) const {
    return static_cast<double>(buffers[idx].data.size()) / static_cast<double>(config.service.buffer_bytes);
  }

  void on_uniform(const UniformBlock& b) override {
    pending_uniform.append(b.bits);
    const std::size_t tb = config.service.test_block_bits;
    while (pending_uniform.size() >= tb) {
      const BitBlock test_block = pending_uniform.slice(0, tb);
      pending_uniform = pending_uniform.slice(tb, pending_uniform.size() - tb);
      const auto reports = bit_tests(test_block, config.service.alpha);
      const bool ok = std::all_of(reports.begin(), reports.end(), [](const GofReport& r) { return r.pass; });
      if (!ok) {
        std::lock_guard lock(mutex);
        ++discarded_uniform_buffers;
        continue;
      }
      const auto bytes = test_block.to_bytes();
      staged[0].insert(staged[0].end(), bytes.begin(), bytes.end());
    }
  }

  void on_gaussian(const GaussianBatch& b) override {
    if (!b.passed()) {
      std::lock_guard lock(mutex);
      ++discarded_gaussian_pools;
      return;
    }
    const int shift = 16 - b.n_out;
    for (std::int32_t c : b.codes) io::append_s16_le(staged[1], static_cast<std::int16_t>(c * (1 << shift)));
  }

  void on_rayleigh(const RayleighBatch& b) override {
    for (double v : b.values) io::append_f32_le(staged[2], static_cast<float>(v));
  }

  void produce() {
    for (;;) {
      OutputType next;
      {
        std::unique_lock lock(mutex);
        space_cv.wait(lock, [&] {
          if (stopping) return true;
          return std::any_of(kTypes.begin(), kTypes.end(), [&](OutputType t) { return fill(index_of(t)) < 1.0; });
        });
        if (stopping) return;
        next = *std::min_element(kTypes.begin(), kTypes.end(),
                                 [&](OutputType a, OutputType b) { return fill(index_of(a)) < fill(index_of(b)); });
      }
      pipeline.run(options.producer_chunk_ticks, mask(next), *this);
      {
        std::lock_guard lock(mutex);
        for (std::size_t k = 0; k < 3; ++k) {
          if (staged[k].empty()) continue;
          buffers[k].data.push(staged[k]);
          buffers[k].produced_bytes += staged[k].size();
          staged[k].clear();
        }
      }
      data_cv.notify_all();
    }
  }
};

QrngService::QrngService(PipelineConfig config, ServiceOptions options)
    : impl_(std::make_unique<Impl>(std::move(config), options)) {
  auto& srv = impl_->server;
  srv.Get("/random", [this](const httplib::Request& req, httplib::Response& res) {
    const auto r = handle_random(req.has_param("type") ? req.get_param_value("type") : "",
                                 req.has_param("bytes") ? req.get_param_value("bytes") : "");
    res.status = r.status;
    for (const auto& [k, v] : r.headers) res.set_header(k, v);
    res.set_content(r.body, r.content_type);
  });
  srv.Get("/health", [this](const httplib::Request&, httplib::Response& res) {
    res.set_content(health().dump(), "application/json");
  });
  if (impl_->options.start_producer) impl_->producer = std::thread([this] { impl_->produce(); });
}

QrngService::~QrngService() { stop(); }

int QrngService::start(const std::string& host, int port) {
  auto& srv = impl_->server;
  int bound = port;
  if (port == 0) {
    bound = srv.bind_to_any_port(host);
    if (bound < 0) throw std::runtime_error("cannot bind " + host);
  } else if (!srv.bind_to_port(host, port)) {
    throw std::runtime_error("cannot bind " + host + ":" + std::to_string(port));
  }
  impl_->listener = std::thread([this] { impl_->server.listen_after_bind(); });
  srv.wait_until_ready();
  return bound;
}

void QrngService::stop() {
  {
    std::lock_guard lock(impl_->mutex);
    impl_->stopping = true;
  }
  impl_->space_cv.notify_all();
  impl_->data_cv.notify_all();
  if (impl_->producer.joinable()) impl_->producer.join();
  impl_->server.stop();
  if (impl_->listener.joinable()) impl_->listener.join();
}

void QrngService::wait() {
  if (impl_->listener.joinable()) impl_->listener.join();
}

QrngService::Response QrngService::handle_random(const std::string& type, const std::string& bytes) {
  Response res;
  auto bad = [&](const std::string& msg) {
    res.status = 400;
    res.content_type = "text/plain";
    res.body = msg + "\n";
    return res;
  };
  OutputType t;
  try {
    t = parse_output_type(type);
  } catch (const std::invalid_argument& e) {
    return bad(e.what());
  }
  if (bytes.empty() || bytes.size() > 18 || !std::all_of(bytes.begin(), bytes.end(), ::isdigit))
    return bad("bytes must be a positive integer");
  const std::size_t n = std::stoull(bytes);
  const auto& svc = impl_->config.service;
  if (n == 0) return bad("bytes must be positive");
  if (n > svc.max_request_bytes) return bad("bytes exceeds max_request_bytes = " + std::to_string(svc.max_request_bytes));
  if (n % element_size(t) != 0)
    return bad(to_string(t) + " responses need a multiple of " + std::to_string(element_size(t)) + " bytes");

  const std::size_t idx = index_of(t);
  std::unique_lock lock(impl_->mutex);
  auto& buf = impl_->buffers[idx];
  const bool ready = impl_->data_cv.wait_for(lock, std::chrono::milliseconds(svc.request_timeout_ms),
                                             [&] { return impl_->stopping || buf.data.size() >= n; });
  if (!ready || buf.data.size() < n) {
    res.status = 503;
    res.content_type = "text/plain";
    res.body = "not enough certified " + to_string(t) + " output buffered\n";
    res.headers["Retry-After"] = "1";
    return res;
  }
  res.headers["X-Stream-Offset"] = std::to_string(buf.served_bytes);
  res.body = buf.data.pop(n);
  buf.served_bytes += n;
  lock.unlock();
  impl_->space_cv.notify_all();

  res.headers["X-QRNG-Type"] = to_string(t);
  switch (t) {
    case OutputType::uniform: res.content_type = "application/octet-stream"; break;
    case OutputType::gaussian:
      res.content_type = "application/x-qrng-gaussian-s16le";
      res.headers["X-QRNG-Quality"] = "extracted, goodness-of-fit gated";
      break;
    case OutputType::rayleigh:
      res.content_type = "application/x-qrng-rayleigh-f32le";
      res.headers["X-QRNG-Quality"] = kRayleighQuality;
      break;
  }
  return res;
}

nlohmann::json QrngService::health() const {
  const auto cert = impl_->pipeline.latest_certification();
  const auto counters = impl_->pipeline.counters();
  auto summary = [](const EntropyReport& r, bool certified) {
    return nlohmann::json{{"certified", certified},
                          {"h_min_per_sample", r.h_min_per_sample},
                          {"h_min_per_bit", r.h_min_per_bit},
                          {"n_eff", r.n_eff},
                          {"g_star", r.g_star},
                          {"extractable_bits", r.extractable_bits},
                          {"block_n", r.block_n}};
  };
  nlohmann::json j;
  j["status"] = cert.certified_i && cert.certified_q ? "ok" : "degraded";
  j["certification"] = {{"epoch", cert.epoch},
                        {"tick", cert.tick},
                        {"error", cert.error},
                        {"i", summary(cert.i, cert.certified_i)},
                        {"q", summary(cert.q, cert.certified_q)}};
  std::lock_guard lock(impl_->mutex);
  nlohmann::json buffers;
  for (OutputType t : kTypes) {
    const auto& b = impl_->buffers[index_of(t)];
    buffers[to_string(t)] = {{"bytes", b.data.size()},
                             {"capacity", impl_->config.service.buffer_bytes},
                             {"fill", impl_->fill(index_of(t))},
                             {"served_bytes", b.served_bytes},
                             {"produced_bytes", b.produced_bytes}};
  }
  j["buffers"] = buffers;
  j["discarded"] = {{"uniform_test_buffers", impl_->discarded_uniform_buffers},
                    {"uniform_uncertified_blocks", counters.uniform_discarded_blocks},
                    {"gaussian_failed_pools", impl_->discarded_gaussian_pools},
                    {"gaussian_uncertified_pools", counters.gaussian_discarded_pools}};
  j["samples_consumed"] = counters.samples_consumed;
  j["calibration_samples"] = counters.calibration_samples;
  j["ticks"] = counters.ticks;
  return j;
}

std::pair<std::string, int> resolve_listen_address(const ServiceConfig& config) {
  std::pair<std::string, int> out{config.listen_address, config.port};
  const char* env = std::getenv("QRNG_LISTEN");
  if (!env || !*env) return out;
  const std::string v(env);
  const auto colon = v.rfind(':');
  if (colon == std::string::npos) {
    out.first = v;
    return out;
  }
  out.first = v.substr(0, colon);
  try {
    out.second = std::stoi(v.substr(colon + 1));
  } catch (const std::exception&) {
    throw std::invalid_argument("QRNG_LISTEN port is not a number: " + v);
  }
  if (out.second < 0 || out.second > 65535) throw std::invalid_argument("QRNG_LISTEN port out of range: " + v);
  return out;
}

}  // namespace triqrng
