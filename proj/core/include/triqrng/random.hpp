#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>

namespace triqrng {

/// Seeds a 64-bit Mersenne Twister from a root seed plus stream labels via
/// std::seed_seq, whose output is fixed by the standard. Distinct labels give
/// statistically independent streams from one configured seed.
std::mt19937_64 make_engine(std::uint64_t root_seed, std::initializer_list<std::uint32_t> labels);

/// Standard normal deviates by the Marsaglia polar method.
///
/// std::normal_distribution is implementation-defined, so the transform is
/// spelled out here to keep streams bit-identical across standard libraries.
/// Uniforms use the top 53 bits of each engine draw.
class GaussianSampler {
 public:
  explicit GaussianSampler(std::mt19937_64 engine) : engine_(std::move(engine)) {}

  double operator()();
  void fill(std::span<double> out, double stddev = 1.0);

 private:
  double uniform_pm1();

  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace triqrng
