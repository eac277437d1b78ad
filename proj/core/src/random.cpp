#include "triqrng/random.hpp"

#include <cmath>
#include <vector>

namespace triqrng {

std::mt19937_64 make_engine(std::uint64_t root_seed, std::initializer_list<std::uint32_t> labels) {
  std::vector<std::uint32_t> material;
  material.reserve(2 + labels.size());
  material.push_back(static_cast<std::uint32_t>(root_seed));
  material.push_back(static_cast<std::uint32_t>(root_seed >> 32));
  material.insert(material.end(), labels.begin(), labels.end());
  std::seed_seq seq(material.begin(), material.end());
  return std::mt19937_64(seq);
}

double GaussianSampler::uniform_pm1() {
  constexpr double kScale = 1.0 / static_cast<double>(std::uint64_t{1} << 53);
  const double u = static_cast<double>(engine_() >> 11) * kScale;
  return 2.0 * u - 1.0;
}

double GaussianSampler::operator()() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u, v, s;
  do {
    u = uniform_pm1();
    v = uniform_pm1();
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double factor = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * factor;
  has_spare_ = true;
  return u * factor;
}

void GaussianSampler::fill(std::span<double> out, double stddev) {
  for (double& x : out) x = stddev * (*this)();
}

}  // namespace triqrng
