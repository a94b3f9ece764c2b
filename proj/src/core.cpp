#include "smx/core.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace smx {

namespace {

void require_finite(std::span<const double> values, const char* who) {
  for (double v : values) {
    if (!std::isfinite(v)) throw std::invalid_argument(std::string(who) + ": non-finite input");
  }
}

}  // namespace

std::vector<double> softmax_temp(std::span<const double> values, double tau) {
  if (values.empty()) throw std::invalid_argument("softmax_temp: empty input");
  if (!(tau > 0.0)) throw std::invalid_argument("softmax_temp: tau must be > 0");
  require_finite(values, "softmax_temp");

  const double vmax = *std::max_element(values.begin(), values.end());
  std::vector<double> out(values.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    out[i] = std::exp((values[i] - vmax) / tau);
    sum += out[i];
  }
  for (double& v : out) v /= sum;
  return out;
}

std::vector<double> minmax_normalise(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("minmax_normalise: empty input");
  require_finite(values, "minmax_normalise");

  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  const double lo = *lo_it;
  const double hi = *hi_it;
  std::vector<double> out(values.size(), 0.0);
  if (hi - lo <= kDegenerateTol) return out;  // equal weights carry no preference
  for (std::size_t i = 0; i < values.size(); ++i) out[i] = (values[i] - lo) / (hi - lo);
  return out;
}

int sample_categorical(std::span<const double> probs, RngStream& rng) {
  if (probs.empty()) throw std::invalid_argument("sample_categorical: empty input");
  double sum = 0.0;
  for (double p : probs) {
    if (!(p >= 0.0)) throw std::invalid_argument("sample_categorical: negative probability");
    sum += p;
  }
  if (std::abs(sum - 1.0) > kSampleTol)
    throw std::invalid_argument("sample_categorical: probabilities not normalised");

  const double u = rng.uniform() * sum;
  double acc = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    acc += probs[i];
    if (u < acc) return static_cast<int>(i);
  }
  // Round-off fell past the end; return the last index with mass.
  for (std::size_t i = probs.size(); i-- > 0;) {
    if (probs[i] > 0.0) return static_cast<int>(i);
  }
  return static_cast<int>(probs.size()) - 1;
}

std::vector<double> mix_dirichlet_noise(std::span<const double> probs, double alpha,
                                        double weight, RngStream& rng) {
  if (!(alpha > 0.0)) throw std::invalid_argument("mix_dirichlet_noise: alpha must be > 0");
  if (!(weight >= 0.0 && weight <= 1.0))
    throw std::invalid_argument("mix_dirichlet_noise: weight must be in [0, 1]");
  double sum = 0.0;
  for (double p : probs) {
    if (!(p >= 0.0)) throw std::invalid_argument("mix_dirichlet_noise: invalid distribution");
    sum += p;
  }
  if (std::abs(sum - 1.0) > kSampleTol)
    throw std::invalid_argument("mix_dirichlet_noise: invalid distribution");

  std::vector<double> noise(probs.size());
  double nsum = 0.0;
  for (double& n : noise) {
    n = rng.gamma(alpha);
    nsum += n;
  }
  std::vector<double> out(probs.size());
  for (std::size_t i = 0; i < probs.size(); ++i) {
    out[i] = (1.0 - weight) * probs[i] + weight * noise[i] / nsum;
  }
  return out;
}

}  // namespace smx
