#include <gtest/gtest.h>

#include <cstdlib>

#include "triqrng/service.hpp"

using namespace triqrng;

namespace {

PipelineConfig service_config() {
  auto c = PipelineConfig::paper_like();
  c.certification.samples = 1 << 18;
  c.extraction.gaussian.pool_size = 4096;
  c.service.buffer_bytes = 1 << 18;
  c.service.max_request_bytes = 1 << 16;
  c.service.request_timeout_ms = 200;
  return c;
}

}  // namespace

TEST(Service, RejectsBadRequests) {
  QrngService s(service_config(), {.start_producer = false});
  EXPECT_EQ(s.handle_random("pink", "16").status, 400);
  EXPECT_EQ(s.handle_random("uniform", "0").status, 400);
  EXPECT_EQ(s.handle_random("uniform", "abc").status, 400);
  EXPECT_EQ(s.handle_random("uniform", "-4").status, 400);
  EXPECT_EQ(s.handle_random("uniform", std::to_string((1 << 16) + 1)).status, 400);
  EXPECT_EQ(s.handle_random("gaussian", "3").status, 400);
  EXPECT_EQ(s.handle_random("rayleigh", "6").status, 400);
}

TEST(Service, EmptyBuffersGive503) {
  QrngService s(service_config(), {.start_producer = false});
  EXPECT_EQ(s.handle_random("uniform", "16").status, 503);
  EXPECT_EQ(s.handle_random("rayleigh", "16").status, 503);
}

TEST(Service, HealthSchema) {
  QrngService s(service_config(), {.start_producer = false});
  const auto h = s.health();
  for (const char* k : {"status", "certification", "buffers", "discarded", "samples_consumed", "ticks"})
    EXPECT_TRUE(h.contains(k)) << k;
  EXPECT_TRUE(h["certification"]["i"].contains("h_min_per_bit"));
  EXPECT_TRUE(h["certification"]["q"].contains("h_min_per_bit"));
  for (const char* t : {"uniform", "gaussian", "rayleigh"}) EXPECT_TRUE(h["buffers"][t].contains("fill")) << t;
}

TEST(Service, ServesDistinctUniformBytes) {
  QrngService s(service_config());
  const auto a = s.handle_random("uniform", "1024");
  const auto b = s.handle_random("uniform", "1024");
  ASSERT_EQ(a.status, 200);
  ASSERT_EQ(b.status, 200);
  EXPECT_EQ(a.body.size(), 1024u);
  EXPECT_NE(a.body, b.body);
  EXPECT_EQ(a.content_type, "application/octet-stream");
  EXPECT_LT(std::stoull(a.headers.at("X-Stream-Offset")), std::stoull(b.headers.at("X-Stream-Offset")));
  const auto r = s.handle_random("rayleigh", "64");
  ASSERT_EQ(r.status, 200);
  EXPECT_EQ(r.headers.at("X-QRNG-Quality"), "denoised-raw, uncertified");
  s.stop();
}

TEST(Service, ListenAddressOverride) {
  ServiceConfig c;
  ::setenv("QRNG_LISTEN", "0.0.0.0:9123", 1);
  EXPECT_EQ(resolve_listen_address(c), (std::pair<std::string, int>{"0.0.0.0", 9123}));
  ::setenv("QRNG_LISTEN", "10.0.0.1", 1);
  EXPECT_EQ(resolve_listen_address(c), (std::pair<std::string, int>{"10.0.0.1", 8080}));
  ::unsetenv("QRNG_LISTEN");
  EXPECT_EQ(resolve_listen_address(c).first, "127.0.0.1");
}
