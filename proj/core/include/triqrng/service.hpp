#pragma once

#include <map>
#include <memory>
#include <string>
#include <utility>

#include <nlohmann/json.hpp>

#include "triqrng/config.hpp"

namespace triqrng {

struct ServiceOptions {
  bool start_producer = true;  // false leaves every buffer empty (503 paths)
  std::size_t producer_chunk_ticks = 256;
};

/// Local plaintext HTTP front end over one pipeline. No TLS, no auth.
///
///   GET /random?type=uniform|gaussian|rayleigh&bytes=N
///   GET /health
///
/// A producer thread advances the pipeline one chunk at a time, always for
/// the output type whose buffer is least full, and blocks while every buffer
/// is at capacity. Uniform bits are released in test_block_bits buffers that
/// passed the internal bit tests; Gaussian pools must pass KS and chi-squared;
/// failing material is discarded and counted. Served bytes are removed from
/// the buffers, so nothing is served twice.
class QrngService {
 public:
  struct Response {
    int status = 200;
    std::string content_type;
    std::string body;
    std::map<std::string, std::string> headers;
  };

  /// Runs pipeline startup (certification, seed) synchronously.
  explicit QrngService(PipelineConfig config, ServiceOptions options = {});
  ~QrngService();
  QrngService(const QrngService&) = delete;
  QrngService& operator=(const QrngService&) = delete;

  /// Binds host:port (port 0 picks a free port), starts serving on a
  /// background thread and returns the bound port.
  int start(const std::string& host, int port);
  /// Stops the server and the producer; idempotent.
  void stop();
  /// Blocks until the server thread exits.
  void wait();

  Response handle_random(const std::string& type, const std::string& bytes);
  nlohmann::json health() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Listen address from the config, overridden by QRNG_LISTEN ("host" or
/// "host:port") when set.
std::pair<std::string, int> resolve_listen_address(const ServiceConfig& config);

}  // namespace triqrng
