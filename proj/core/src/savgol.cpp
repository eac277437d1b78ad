#include "triqrng/savgol.hpp"

#include <Eigen/Dense>

#include <stdexcept>

namespace triqrng {

namespace {

// Weights w such that sum w[j] y[j] is the value at offset `at` of the
// least-squares polynomial through points at offsets first .. first+len-1.
std::vector<double> fit_weights(int first, std::size_t len, int order, int at, double scale) {
  const int deg = std::min(order, static_cast<int>(len) - 1);
  Eigen::MatrixXd v(static_cast<Eigen::Index>(len), deg + 1);
  for (std::size_t r = 0; r < len; ++r) {
    const double x = static_cast<double>(first + static_cast<int>(r) - at) / scale;
    double p = 1.0;
    for (int c = 0; c <= deg; ++c, p *= x) v(static_cast<Eigen::Index>(r), c) = p;
  }
  // Row 0 of the pseudo-inverse evaluates the fit at x = 0, i.e. at `at`.
  const Eigen::MatrixXd pinv = v.colPivHouseholderQr().solve(
      Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(len), static_cast<Eigen::Index>(len)));
  std::vector<double> w(len);
  for (std::size_t r = 0; r < len; ++r) w[r] = pinv(0, static_cast<Eigen::Index>(r));
  return w;
}

}  // namespace

SavitzkyGolay::SavitzkyGolay(std::size_t window, int order) : window_(window), order_(order) {
  if (window < 1 || window % 2 == 0) throw std::invalid_argument("Savitzky-Golay window must be odd");
  if (order < 0 || static_cast<std::size_t>(order) >= window)
    throw std::invalid_argument("Savitzky-Golay order must be in [0, window)");
  const int half = static_cast<int>(window / 2);
  const double scale = std::max(1, half);
  center_ = fit_weights(-half, window, order, 0, scale);
  for (int i = 0; i < half; ++i) edge_.push_back(fit_weights(0, static_cast<std::size_t>(i + half + 1), order, i, scale));
}

std::vector<double> SavitzkyGolay::apply(std::span<const double> values) const {
  const std::size_t n = values.size();
  if (n < window_) throw std::invalid_argument("sequence shorter than the Savitzky-Golay window");
  const std::size_t half = window_ / 2;
  std::vector<double> out(n);
  for (std::size_t i = half; i + half < n; ++i) {
    double acc = 0.0;
    const double* x = values.data() + i - half;
    for (std::size_t j = 0; j < window_; ++j) acc += center_[j] * x[j];
    out[i] = acc;
  }
  for (std::size_t i = 0; i < half; ++i) {
    const auto& w = edge_[i];
    double left = 0.0, right = 0.0;
    for (std::size_t j = 0; j < w.size(); ++j) {
      left += w[j] * values[j];
      right += w[j] * values[n - 1 - j];  // mirrored: output n-1-i over inputs n-1 .. n-1-(i+half)
    }
    out[i] = left;
    out[n - 1 - i] = right;
  }
  return out;
}

std::vector<double> savitzky_golay(std::span<const double> values, std::size_t window, int order) {
  return SavitzkyGolay(window, order).apply(values);
}

std::string SavitzkyGolayDenoiser::name() const {
  return "savitzky_golay(window=" + std::to_string(filter_.window()) + ", order=" + std::to_string(filter_.order()) +
         ")";
}

}  // namespace triqrng
