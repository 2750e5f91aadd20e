#pragma once

#include <cstddef>
#include <functional>
#include <optional>

#include "dpbyz/attack.hpp"
#include "dpbyz/dataset.hpp"
#include "dpbyz/gar.hpp"
#include "dpbyz/model.hpp"
#include "dpbyz/numerics.hpp"
#include "dpbyz/privacy.hpp"

namespace dpbyz {

// ---------------------------------------------------------------------------
// VN-ratio feasibility under DP noise.
//
// With C = epsilon / sqrt(ln(1.25/delta)), the VN ratio condition for a rule
// with constant k_F(n, f) cannot hold once
//     1 / k_F(n, f)  >  b * C / sqrt(8 d).
// vn_feasibility evaluates that failure inequality with the exact k_F of the
// spec; table1_condition evaluates the per-family relaxed necessary
// conditions instead. The two must agree one way: a relaxed failure implies
// an exact failure.
// ---------------------------------------------------------------------------

struct FeasibilityQuery {
  GarSpec spec;
  std::size_t b;  // batch size
  std::size_t d;  // model dimension
  PrivacyBudget budget;
};

struct FeasibilityVerdict {
  double c_constant;   // C = epsilon / sqrt(ln(1.25/delta))
  double threshold;    // b * C / sqrt(8 d)
  double inverse_kf;   // 1 / k_F(n, f)
  bool vn_can_hold;    // inverse_kf <= threshold
  std::optional<std::size_t> min_batch;  // least feasible b, none above cap
  double max_byz_fraction;  // largest feasible f/n over integer f
};

inline constexpr std::size_t kDefaultBatchCap = 1'000'000;

double c_constant(const PrivacyBudget& budget);
FeasibilityVerdict vn_feasibility(const FeasibilityQuery& q,
                                  std::size_t batch_cap = kDefaultBatchCap);
bool table1_condition(const GarSpec& spec, std::size_t b, std::size_t d,
                      const PrivacyBudget& budget);

// ---------------------------------------------------------------------------
// Convergence-rate bounds for the strongly convex case.
// ---------------------------------------------------------------------------

struct RateBoundQuery {
  double mu;      // Lipschitz constant of the gradient
  double lambda;  // strong convexity constant
  double alpha;   // resilience angle, in [0, pi/2)
  double c;       // moment constant
  double sigma;   // per-sample gradient variance bound
  std::size_t b;
  std::size_t d;
  std::size_t steps;
  double noise_std;
  double g_max;
};

// (1/(T+1)) * (mu c / (2 lambda^2 (1 - sin a)^2)) * (sigma^2/b + d s^2 + g_max^2)
double theorem_upper_bound(const RateBoundQuery& q);

// Cramer-Rao construction: (sigma^2/b + d s^2) / (2T)
double theorem_lower_bound(double sigma, std::size_t b, std::size_t d,
                           std::size_t steps, double noise_std);

// Simulates the lower-bound construction: T observations of a fixed point
// with per-coordinate noise variance sigma^2/(d b) + s^2, estimated by the
// sample mean. Predicted squared error is (sigma^2/b + d s^2) / T.
struct TestbedResult {
  double empirical_error;
  double predicted_error;
};
TestbedResult quadratic_testbed(std::size_t d, double sigma, std::size_t b,
                                std::size_t steps, double noise_std,
                                std::size_t trials, RandomStream& stream);

// ---------------------------------------------------------------------------
// Empirical probes on a concrete task.
// ---------------------------------------------------------------------------

struct VnEstimate {
  double ratio;          // +inf when the mean gradient vanishes
  double numerator_std;  // sqrt(mean ||report - sample mean||^2)
  double norm_of_mean;
  bool mean_vanished;
};

VnEstimate empirical_vn_ratio(const Dataset& train, const ModelParams& params,
                              const ClipConfig& clip_cfg, std::size_t b,
                              const std::optional<NoiseCalibration>& cal,
                              std::size_t trials, RandomStream& stream);

// Draws one honest report (the stream provides all randomness).
using HonestReportFn = std::function<Vec(RandomStream&)>;

struct AngleProbe {
  double inner_product_mean;  // Monte Carlo estimate of <E[R_t], grad>
  double inner_product_stderr;
  double grad_norm_sq;

  double rhs_at(double alpha) const;  // (1 - sin a) ||grad||^2
  // Condition (1) at angle alpha, with a z-sigma confidence margin.
  bool ok_at(double alpha, double z = 0.0) const;
};

AngleProbe resilience_angle_probe(const GarSpec& spec,
                                  const std::optional<AttackSpec>& attack,
                                  const HonestReportFn& honest,
                                  const Vec& true_gradient, std::size_t trials,
                                  RandomStream& stream);

}  // namespace dpbyz
