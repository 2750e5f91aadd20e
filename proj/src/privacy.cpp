#include "dpbyz/privacy.hpp"

#include <cmath>
#include <stdexcept>

namespace dpbyz {

void validate(const PrivacyBudget& budget) {
  if (!(budget.epsilon > 0.0 && budget.epsilon < 1.0)) {
    throw std::invalid_argument("privacy budget: epsilon must be in (0,1)");
  }
  if (!(budget.delta > 0.0 && budget.delta < 1.0)) {
    throw std::invalid_argument("privacy budget: delta must be in (0,1)");
  }
}

NoiseCalibration calibrate(const PrivacyBudget& budget, double g_max,
                           std::size_t b) {
  validate(budget);
  if (!(g_max > 0.0) || !std::isfinite(g_max)) {
    throw std::invalid_argument("calibrate: g_max must be finite and > 0");
  }
  if (b == 0) throw std::invalid_argument("calibrate: b must be >= 1");
  NoiseCalibration cal;
  cal.g_max = g_max;
  cal.batch_size = b;
  cal.sensitivity = 2.0 * g_max / static_cast<double>(b);
  cal.noise_std = 2.0 * g_max * std::sqrt(2.0 * std::log(1.25 / budget.delta)) /
                  (static_cast<double>(b) * budget.epsilon);
  return cal;
}

Vec sanitize(const Vec& g, const NoiseCalibration& cal, RandomStream& stream) {
  Vec out = stream.gaussian_vector(g.size(), cal.noise_std);
  for (std::size_t j = 0; j < g.size(); ++j) out[j] += g[j];
  return out;
}

std::pair<double, double> compose(const PrivacyBudget& per_step,
                                  std::size_t steps) {
  if (steps == 0) throw std::invalid_argument("compose: steps must be >= 1");
  const double t = static_cast<double>(steps);
  return {t * per_step.epsilon, t * per_step.delta};
}

}  // namespace dpbyz
