#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

namespace triqrng {

/// Least-squares local polynomial smoother. Interior points use the
/// symmetric window; the first and last window/2 points fit on the window
/// truncated at the sequence boundary. Polynomials of degree <= order pass
/// through unchanged. Weights are precomputed, so one instance can filter
/// any number of sequences and is safe to share.
class SavitzkyGolay {
 public:
  SavitzkyGolay(std::size_t window, int order);

  std::vector<double> apply(std::span<const double> values) const;

  std::size_t window() const { return window_; }
  int order() const { return order_; }
  /// Weights of the symmetric interior window, offsets -window/2 .. window/2.
  const std::vector<double>& center_weights() const { return center_; }

 private:
  std::size_t window_;
  int order_;
  std::vector<double> center_;
  // edge_[i] holds the weights for output i < window/2 over inputs 0 .. i + window/2.
  std::vector<std::vector<double>> edge_;
};

std::vector<double> savitzky_golay(std::span<const double> values, std::size_t window, int order);

/// Pluggable smoothing stage for raw Rayleigh streams. Only Savitzky-Golay
/// ships; other filters plug in here.
class Denoiser {
 public:
  virtual ~Denoiser() = default;
  virtual std::vector<double> apply(std::span<const double> values) const = 0;
  virtual std::string name() const = 0;
};

class SavitzkyGolayDenoiser final : public Denoiser {
 public:
  SavitzkyGolayDenoiser(std::size_t window, int order) : filter_(window, order) {}

  std::vector<double> apply(std::span<const double> values) const override { return filter_.apply(values); }
  std::string name() const override;

 private:
  SavitzkyGolay filter_;
};

}  // namespace triqrng
