#pragma once

#include <cstddef>
#include <utility>

#include "dpbyz/numerics.hpp"

namespace dpbyz {

// Per-step (epsilon, delta), both restricted to (0,1): the range in which
// the Gaussian mechanism's guarantee applies.
struct PrivacyBudget {
  double epsilon;
  double delta;
};

void validate(const PrivacyBudget& budget);

struct NoiseCalibration {
  double g_max;
  std::size_t batch_size;
  double sensitivity;  // 2 * g_max / b
  double noise_std;    // 2 * g_max * sqrt(2 ln(1.25/delta)) / (b * epsilon)
};

// Natural logarithm throughout.
NoiseCalibration calibrate(const PrivacyBudget& budget, double g_max,
                           std::size_t b);

// g + z with z ~ N(0, I_d * s^2). Only honest workers call this; Byzantine
// workers are outside the privacy guarantee and never add noise.
Vec sanitize(const Vec& g, const NoiseCalibration& cal, RandomStream& stream);

// Classical sequential composition: budgets add up linearly over T steps.
// Reported for logging; the per-step budget drives calibration.
std::pair<double, double> compose(const PrivacyBudget& per_step, std::size_t steps);

}  // namespace dpbyz
