#include "dpbyz/analyzer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace dpbyz {

double c_constant(const PrivacyBudget& budget) {
  validate(budget);
  return budget.epsilon / std::sqrt(std::log(1.25 / budget.delta));
}

namespace {

double inverse_kf(const GarSpec& spec) {
  const double k = kf(spec);
  return std::isinf(k) ? 0.0 : 1.0 / k;
}

bool holds_at(double inv_kf, double c, std::size_t b, std::size_t d) {
  return inv_kf <= static_cast<double>(b) * c / std::sqrt(8.0 * static_cast<double>(d));
}

}  // namespace

FeasibilityVerdict vn_feasibility(const FeasibilityQuery& q,
                                  std::size_t batch_cap) {
  if (q.spec.kind == GarKind::Average) {
    throw std::invalid_argument("vn_feasibility: Average has no VN constant");
  }
  check_applicable(q.spec);
  if (q.b == 0 || q.d == 0) {
    throw std::invalid_argument("vn_feasibility: b and d must be >= 1");
  }
  FeasibilityVerdict v;
  v.c_constant = c_constant(q.budget);
  v.threshold =
      static_cast<double>(q.b) * v.c_constant / std::sqrt(8.0 * static_cast<double>(q.d));
  v.inverse_kf = inverse_kf(q.spec);
  v.vn_can_hold = v.inverse_kf <= v.threshold;

  // Least b with b * C / sqrt(8d) >= 1/k: closed-form ceiling, then a local
  // scan to absorb floating-point edge cases.
  v.min_batch = std::nullopt;
  const double exact =
      v.inverse_kf * std::sqrt(8.0 * static_cast<double>(q.d)) / v.c_constant;
  std::size_t candidate =
      exact <= 1.0 ? 1 : static_cast<std::size_t>(std::ceil(exact));
  if (candidate > 2) candidate -= 2;
  else candidate = 1;
  for (std::size_t b = candidate; b <= batch_cap; ++b) {
    if (holds_at(v.inverse_kf, v.c_constant, b, q.d)) {
      v.min_batch = b;
      break;
    }
  }

  // Largest f/n keeping the condition, scanning integer f downward from the
  // rule's own applicability cap.
  v.max_byz_fraction = 0.0;
  for (std::size_t f = (q.spec.n - 1) / 2 + 1; f-- > 0;) {
    GarSpec at_f{q.spec.kind, q.spec.n, f};
    if (!applicable(at_f)) continue;
    if (holds_at(inverse_kf(at_f), v.c_constant, q.b, q.d)) {
      v.max_byz_fraction =
          static_cast<double>(f) / static_cast<double>(q.spec.n);
      break;
    }
  }
  return v;
}

bool table1_condition(const GarSpec& spec, std::size_t b, std::size_t d,
                      const PrivacyBudget& budget) {
  if (spec.kind == GarKind::Average) {
    throw std::invalid_argument("table1_condition: not defined for Average");
  }
  check_applicable(spec);
  const double c = c_constant(budget);
  const double cb = c * static_cast<double>(b);
  const double n = static_cast<double>(spec.n);
  const double f = static_cast<double>(spec.f);
  const double dd = static_cast<double>(d);
  const double tau = f / n;
  switch (spec.kind) {
    case GarKind::Krum:
    case GarKind::Bulyan:
      return !(std::sqrt(16.0 * dd * (n + f * f)) > cb);
    case GarKind::Median:
      return !(std::sqrt(8.0 * dd * (n - f)) > cb);
    case GarKind::Meamed:
      return !(std::sqrt(40.0 * dd * (n + 1.0)) > cb);
    case GarKind::Mda:
      return !(tau > cb / (8.0 * std::sqrt(dd) + cb));
    case GarKind::TrimmedMean:
      return !(tau > cb * cb / (16.0 * dd + 2.0 * cb * cb));
    case GarKind::Phocas:
      return !(tau > cb * cb / (64.0 * dd + 2.0 * cb * cb));
    case GarKind::Average: break;
  }
  throw std::logic_error("unknown GarKind");
}

double theorem_upper_bound(const RateBoundQuery& q) {
  if (!(q.alpha >= 0.0 && q.alpha < std::numbers::pi / 2.0)) {
    throw std::invalid_argument("theorem_upper_bound: alpha must be in [0, pi/2)");
  }
  if (q.mu <= 0.0 || q.lambda <= 0.0 || q.c <= 0.0 || q.sigma < 0.0 ||
      q.noise_std < 0.0 || q.g_max < 0.0 || q.b == 0 || q.steps == 0) {
    throw std::invalid_argument("theorem_upper_bound: invalid query");
  }
  const double one_minus_sin = 1.0 - std::sin(q.alpha);
  const double prefactor =
      q.mu * q.c / (2.0 * q.lambda * q.lambda * one_minus_sin * one_minus_sin);
  const double variance_terms = q.sigma * q.sigma / static_cast<double>(q.b) +
                                static_cast<double>(q.d) * q.noise_std * q.noise_std +
                                q.g_max * q.g_max;
  return prefactor * variance_terms / static_cast<double>(q.steps + 1);
}

double theorem_lower_bound(double sigma, std::size_t b, std::size_t d,
                           std::size_t steps, double noise_std) {
  if (b == 0 || steps == 0 || sigma < 0.0 || noise_std < 0.0) {
    throw std::invalid_argument("theorem_lower_bound: invalid query");
  }
  return (sigma * sigma / static_cast<double>(b) +
          static_cast<double>(d) * noise_std * noise_std) /
         (2.0 * static_cast<double>(steps));
}

TestbedResult quadratic_testbed(std::size_t d, double sigma, std::size_t b,
                                std::size_t steps, double noise_std,
                                std::size_t trials, RandomStream& stream) {
  if (d == 0 || b == 0 || steps == 0 || trials == 0) {
    throw std::invalid_argument("quadratic_testbed: invalid query");
  }
  // Per-coordinate observation variance sigma^2/(d b) + s^2 so the total
  // vector variance matches the bound's sigma^2/b + d s^2.
  const double per_coord_var =
      sigma * sigma / (static_cast<double>(d) * static_cast<double>(b)) +
      noise_std * noise_std;
  const double per_coord_std = std::sqrt(per_coord_var);
  const double inv_t = 1.0 / static_cast<double>(steps);

  double total_sq_error = 0.0;
  Vec estimate(d);
  for (std::size_t trial = 0; trial < trials; ++trial) {
    std::fill(estimate.begin(), estimate.end(), 0.0);
    for (std::size_t t = 0; t < steps; ++t) {
      for (std::size_t j = 0; j < d; ++j) {
        estimate[j] += per_coord_std * stream.next_standard_normal();
      }
    }
    double sq = 0.0;
    for (double x : estimate) {
      const double e = x * inv_t;  // sample mean; the true point is 0
      sq += e * e;
    }
    total_sq_error += sq;
  }
  TestbedResult result;
  result.empirical_error = total_sq_error / static_cast<double>(trials);
  result.predicted_error = (sigma * sigma / static_cast<double>(b) +
                            static_cast<double>(d) * noise_std * noise_std) *
                           inv_t;
  return result;
}

VnEstimate empirical_vn_ratio(const Dataset& train, const ModelParams& params,
                              const ClipConfig& clip_cfg, std::size_t b,
                              const std::optional<NoiseCalibration>& cal,
                              std::size_t trials, RandomStream& stream) {
  if (trials < 2) throw std::invalid_argument("empirical_vn_ratio: trials must be >= 2");
  std::vector<Vec> reports;
  reports.reserve(trials);
  for (std::size_t t = 0; t < trials; ++t) {
    Batch batch = sample_batch(train, b, stream);
    Vec g = batch_gradient(params, batch, clip_cfg);
    if (cal) g = sanitize(g, *cal, stream);
    reports.push_back(std::move(g));
  }
  auto [mean, std_dev] = coordinate_stats(reports);
  double sq_dev = 0.0;
  for (const Vec& r : reports) {
    for (std::size_t j = 0; j < r.size(); ++j) {
      const double dev = r[j] - mean[j];
      sq_dev += dev * dev;
    }
  }
  VnEstimate est;
  est.numerator_std = std::sqrt(sq_dev / static_cast<double>(trials));
  est.norm_of_mean = l2_norm(mean);
  est.mean_vanished = est.norm_of_mean < 1e-12;
  est.ratio = est.mean_vanished ? std::numeric_limits<double>::infinity()
                                : est.numerator_std / est.norm_of_mean;
  return est;
}

double AngleProbe::rhs_at(double alpha) const {
  return (1.0 - std::sin(alpha)) * grad_norm_sq;
}

bool AngleProbe::ok_at(double alpha, double z) const {
  return inner_product_mean + z * inner_product_stderr >= rhs_at(alpha);
}

AngleProbe resilience_angle_probe(const GarSpec& spec,
                                  const std::optional<AttackSpec>& attack,
                                  const HonestReportFn& honest,
                                  const Vec& true_gradient, std::size_t trials,
                                  RandomStream& stream) {
  if (trials < 100) {
    throw std::invalid_argument("resilience_angle_probe: trials must be >= 100");
  }
  const double grad_norm = l2_norm(true_gradient);
  if (grad_norm <= 0.0) {
    throw std::invalid_argument("resilience_angle_probe: zero true gradient");
  }
  check_applicable(spec);
  const bool attacked = attack && attack->kind != AttackKind::None;
  const std::size_t honest_count = attacked ? spec.n - spec.f : spec.n;

  double sum = 0.0;
  double sum_sq = 0.0;
  std::vector<Vec> reports;
  for (std::size_t t = 0; t < trials; ++t) {
    reports.clear();
    for (std::size_t i = 0; i < honest_count; ++i) {
      reports.push_back(honest(stream));
    }
    if (attacked) {
      const Vec forged = forge(*attack, reports);
      for (std::size_t i = 0; i < spec.f; ++i) reports.push_back(forged);
    }
    const Vec agg = aggregate(spec, reports);
    double dot = 0.0;
    for (std::size_t j = 0; j < agg.size(); ++j) {
      dot += agg[j] * true_gradient[j];
    }
    sum += dot;
    sum_sq += dot * dot;
  }
  const double nt = static_cast<double>(trials);
  AngleProbe probe;
  probe.inner_product_mean = sum / nt;
  const double var =
      std::max(0.0, sum_sq / nt - probe.inner_product_mean * probe.inner_product_mean);
  probe.inner_product_stderr = std::sqrt(var / nt);
  probe.grad_norm_sq = grad_norm * grad_norm;
  return probe;
}

}  // namespace dpbyz
