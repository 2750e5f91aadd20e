#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <stdexcept>

#include "dpbyz/analyzer.hpp"

using namespace dpbyz;

namespace {

const PrivacyBudget kTightBudget{0.2, 1e-6};

bool holds(const GarSpec& spec, std::size_t b, std::size_t d,
           const PrivacyBudget& budget) {
  return vn_feasibility({spec, b, d, budget}).vn_can_hold;
}

}  // namespace

TEST_CASE("c_constant worked example") {
  // C = eps / sqrt(ln(1.25/delta)) = 0.2 / sqrt(ln 1.25e6)
  const double expect = 0.2 / std::sqrt(std::log(1.25e6));
  CHECK(c_constant(kTightBudget) == doctest::Approx(expect).epsilon(1e-12));
  CHECK(c_constant(kTightBudget) == doctest::Approx(0.0533783).epsilon(1e-5));
  CHECK_THROWS_AS(c_constant(PrivacyBudget{2.0, 1e-6}), std::invalid_argument);
}

TEST_CASE("vn_feasibility at the headline operating point") {
  const FeasibilityVerdict v =
      vn_feasibility({{GarKind::Mda, 11, 5}, 50, 69, kTightBudget});
  CHECK(v.inverse_kf == doctest::Approx(std::sqrt(8.0) * 5.0 / 6.0).epsilon(1e-12));
  CHECK(v.threshold ==
        doctest::Approx(50.0 * c_constant(kTightBudget) / std::sqrt(8.0 * 69.0))
            .epsilon(1e-12));
  CHECK(v.threshold == doctest::Approx(0.113596).epsilon(1e-5));
  CHECK_FALSE(v.vn_can_hold);  // 2.357 > 0.1136
  REQUIRE(v.min_batch.has_value());
  CHECK(*v.min_batch == 1038);
  CHECK(v.max_byz_fraction == 0.0);  // only f = 0 is feasible at b = 50
}

TEST_CASE("min_batch equals a brute-force scan") {
  const std::vector<GarSpec> specs{{GarKind::Mda, 11, 5},
                                   {GarKind::Median, 11, 5},
                                   {GarKind::Krum, 13, 5},
                                   {GarKind::Phocas, 11, 5},
                                   {GarKind::TrimmedMean, 11, 3},
                                   {GarKind::Meamed, 21, 4}};
  for (const GarSpec& spec : specs) {
    for (std::size_t d : {1ul, 69ul, 1000ul}) {
      const FeasibilityQuery q{spec, 50, d, kTightBudget};
      const FeasibilityVerdict v = vn_feasibility(q);
      const double inv = 1.0 / kf(spec);
      const double c = c_constant(kTightBudget);
      std::size_t scan = 0;
      for (std::size_t b = 1; b <= kDefaultBatchCap; ++b) {
        if (inv <= double(b) * c / std::sqrt(8.0 * double(d))) {
          scan = b;
          break;
        }
      }
      REQUIRE(v.min_batch.has_value());
      CHECK_MESSAGE(*v.min_batch == scan, to_string(spec.kind) << " d=" << d);
    }
  }

  // An absurd dimension pushes min_batch past the cap.
  const FeasibilityVerdict big =
      vn_feasibility({{GarKind::Mda, 11, 5}, 50, 25'600'000, kTightBudget}, 10'000);
  CHECK_FALSE(big.min_batch.has_value());
}

TEST_CASE("max_byz_fraction is the best feasible integer f") {
  // At a large batch the MDA condition holds even for moderate f.
  const FeasibilityVerdict v =
      vn_feasibility({{GarKind::Mda, 11, 5}, 100000, 69, kTightBudget});
  double best = 0.0;
  for (std::size_t f = 0; 2 * f + 1 <= 11; ++f) {
    const GarSpec at{GarKind::Mda, 11, f};
    const double inv = f == 0 ? 0.0 : 1.0 / kf(at);
    if (inv <= 100000.0 * c_constant(kTightBudget) / std::sqrt(8.0 * 69.0)) {
      best = std::max(best, double(f) / 11.0);
    }
  }
  CHECK(v.max_byz_fraction == doctest::Approx(best));
  CHECK(v.max_byz_fraction > 0.0);
}

TEST_CASE("table1 failure implies exact failure (all rules but Phocas)") {
  RandomStream stream(61, 0);
  const std::vector<GarKind> kinds{GarKind::Mda,    GarKind::Krum,
                                   GarKind::Bulyan, GarKind::Median,
                                   GarKind::Meamed, GarKind::TrimmedMean};
  int tested = 0;
  for (int rep = 0; rep < 400; ++rep) {
    const std::size_t n = 3 + stream.next_u64() % 38;
    const std::size_t f = stream.next_u64() % (n / 2 + 1);
    const std::size_t b = 1 + stream.next_u64() % 4000;
    const std::size_t d = 1 + stream.next_u64() % 2000;
    const PrivacyBudget budget{0.05 + 0.9 * stream.next_uniform(),
                               std::pow(10.0, -1.5 - 6.0 * stream.next_uniform())};
    for (GarKind kind : kinds) {
      const GarSpec spec{kind, n, f};
      if (!applicable(spec)) continue;
      ++tested;
      const bool relaxed_ok = table1_condition(spec, b, d, budget);
      const bool exact_ok = holds(spec, b, d, budget);
      if (!relaxed_ok) {
        CHECK_MESSAGE(!exact_ok, to_string(kind) << " n=" << n << " f=" << f
                                                 << " b=" << b << " d=" << d);
      }
    }
  }
  CHECK(tested > 1000);
}

TEST_CASE("the Phocas relaxation is only asymptotically necessary") {
  // k_Phocas = sqrt(4 + A) >= 2, so the exact condition holds for any f once
  // b C / sqrt(8d) >= 1/2, while the tau-based relaxation still fires at
  // large tau. The relaxation therefore implies exact failure only when the
  // noise term dominates (small C^2 b^2 / d), not pointwise.

  // Concrete counterexample at unremarkable parameters: C = 0.2, so the
  // threshold is 50 * 0.2 / 20 = 0.5 >= 1/k = 0.4895, yet tau = 1/7 exceeds
  // the relaxed cut C^2 b^2 / (64 d + 2 C^2 b^2) = 100/3400.
  const GarSpec spec{GarKind::Phocas, 7, 1};
  const double eps = 0.2 * std::sqrt(std::log(1.25e6));
  const PrivacyBudget budget{eps, 1e-6};
  CHECK(c_constant(budget) == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(holds(spec, 50, 50, budget));
  CHECK_FALSE(table1_condition(spec, 50, 50, budget));

  // In the noise-dominated regime d >= 8 C^2 b^2 (and n small enough that
  // A stays bounded) the exact condition always fails, so the implication
  // holds vacuously there.
  RandomStream stream(62, 0);
  int tested = 0;
  for (int rep = 0; rep < 2000; ++rep) {
    const std::size_t n = 3 + stream.next_u64() % 38;
    const std::size_t f = 1 + stream.next_u64() % (n / 2);
    if (!applicable({GarKind::Phocas, n, f})) continue;
    const std::size_t b = 1 + stream.next_u64() % 4000;
    const PrivacyBudget q{0.05 + 0.9 * stream.next_uniform(), 1e-6};
    const double x = c_constant(q) * c_constant(q) * double(b) * double(b);
    const std::size_t d =
        static_cast<std::size_t>(std::ceil(8.0 * x)) + 1 + stream.next_u64() % 500;
    if (!table1_condition({GarKind::Phocas, n, f}, b, d, q)) {
      CHECK_FALSE(holds({GarKind::Phocas, n, f}, b, d, q));
      ++tested;
    }
  }
  CHECK(tested > 100);
}

TEST_CASE("vn_can_hold monotone in b, epsilon, -d, -f") {
  RandomStream stream(67, 0);
  for (int rep = 0; rep < 200; ++rep) {
    const std::size_t n = 11;
    const std::size_t f = 1 + stream.next_u64() % 5;
    const std::size_t b = 1 + stream.next_u64() % 3000;
    const std::size_t d = 1 + stream.next_u64() % 500;
    const double eps = 0.05 + 0.9 * stream.next_uniform();
    const PrivacyBudget budget{eps, 1e-6};
    const GarSpec spec{GarKind::Mda, n, f};
    if (!holds(spec, b, d, budget)) continue;
    // Any relaxation of the query keeps feasibility.
    CHECK(holds(spec, b + 1 + stream.next_u64() % 100, d, budget));
    CHECK(holds(spec, b, d, {std::min(0.999, eps * 1.2), 1e-6}));
    if (d > 1) CHECK(holds(spec, b, 1 + stream.next_u64() % d, budget));
    if (f > 1) CHECK(holds({GarKind::Mda, n, f - 1}, b, d, budget));
  }
}

TEST_CASE("rate bound formulas") {
  // Hand-evaluated example.
  RateBoundQuery q{2.0, 0.5, std::numbers::pi / 6.0, 3.0, 0.4, 10, 7, 99, 0.05, 0.01};
  const double prefactor = 2.0 * 3.0 / (2.0 * 0.25 * 0.25);  // mu c / (2 l^2 (1-sin)^2)
  const double variance = 0.4 * 0.4 / 10.0 + 7.0 * 0.05 * 0.05 + 0.01 * 0.01;
  CHECK(theorem_upper_bound(q) ==
        doctest::Approx(prefactor * variance / 100.0).epsilon(1e-12));

  CHECK(theorem_lower_bound(0.4, 10, 7, 99, 0.05) ==
        doctest::Approx((0.16 / 10.0 + 7.0 * 0.0025) / 198.0).epsilon(1e-12));

  // The upper bound dominates the lower bound on matching inputs whenever
  // the prefactor is at least 1/2 (mu = lambda = c = 1, alpha = 0).
  RateBoundQuery m{1.0, 1.0, 0.0, 1.0, 1.0, 50, 69, 1000, 1.05976e-2, 1e-2};
  CHECK(theorem_upper_bound(m) >=
        theorem_lower_bound(1.0, 50, 69, 1000, 1.05976e-2));

  CHECK_THROWS_AS(theorem_upper_bound(RateBoundQuery{1, 1, 2.0, 1, 1, 50, 69, 10, 0, 0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(theorem_lower_bound(1.0, 0, 69, 10, 0.0), std::invalid_argument);
}

TEST_CASE("upper bound scales as d log(1/delta) / (T b^2 eps^2)") {
  // Plugging the calibrated s into the bound: the d s^2 term scales linearly
  // in d and log(1/delta) and inversely in T b^2 eps^2.
  auto bound = [](std::size_t d, std::size_t b, double eps, double delta,
                  std::size_t steps) {
    const double s = calibrate({eps, delta}, 1e-2, b).noise_std;
    return theorem_upper_bound(
        RateBoundQuery{1.0, 1.0, 0.0, 1.0, 0.0, b, d, steps, s, 0.0});
  };
  const double base = bound(100, 50, 0.2, 1e-6, 999);
  CHECK(bound(200, 50, 0.2, 1e-6, 999) == doctest::Approx(2.0 * base).epsilon(1e-9));
  CHECK(bound(100, 100, 0.2, 1e-6, 999) == doctest::Approx(base / 4.0).epsilon(1e-9));
  CHECK(bound(100, 50, 0.4, 1e-6, 999) == doctest::Approx(base / 4.0).epsilon(1e-9));
  CHECK(bound(100, 50, 0.2, 1e-6, 1999) == doctest::Approx(base / 2.0).epsilon(1e-3));
  const double ratio = bound(100, 50, 0.2, 1e-12, 999) / base;
  CHECK(ratio == doctest::Approx(std::log(1.25e12) / std::log(1.25e6)).epsilon(1e-9));
}

TEST_CASE("quadratic testbed matches its prediction") {
  RandomStream stream(71, stream_id::kTestbed);
  const TestbedResult r = quadratic_testbed(10, 1.0, 10, 100, 0.01, 2000, stream);
  CHECK(r.predicted_error ==
        doctest::Approx((1.0 / 10.0 + 10.0 * 1e-4) / 100.0).epsilon(1e-12));
  CHECK(r.empirical_error == doctest::Approx(r.predicted_error).epsilon(0.05));
  CHECK_THROWS_AS(quadratic_testbed(0, 1.0, 10, 100, 0.01, 10, stream),
                  std::invalid_argument);
}

TEST_CASE("empirical_vn_ratio on a degenerate dataset") {
  // All samples identical: every batch gradient is the same vector, so the
  // numerator vanishes and the ratio is 0 without noise.
  Dataset train;
  train.feature_count = 2;
  for (int i = 0; i < 20; ++i) train.samples.push_back({{1.0, 2.0}, 1.0});
  const ModelParams params = ModelParams::zeros(2);
  const ClipConfig cfg{1e-2};
  RandomStream stream(73, stream_id::kProbe);
  const VnEstimate plain =
      empirical_vn_ratio(train, params, cfg, 5, std::nullopt, 50, stream);
  CHECK(plain.ratio == doctest::Approx(0.0));
  CHECK_FALSE(plain.mean_vanished);
  CHECK(plain.norm_of_mean == doctest::Approx(cfg.g_max).epsilon(1e-9));

  // With noise the numerator concentrates near s sqrt(d), d = 3.
  const NoiseCalibration cal = calibrate({0.2, 1e-6}, 1e-2, 5);
  RandomStream stream2(73, stream_id::kProbe);
  const VnEstimate noisy =
      empirical_vn_ratio(train, params, cfg, 5, cal, 400, stream2);
  CHECK(noisy.numerator_std ==
        doctest::Approx(cal.noise_std * std::sqrt(3.0)).epsilon(0.1));
  CHECK(noisy.ratio > plain.ratio);
}

TEST_CASE("empirical_vn_ratio flags a vanished mean") {
  // A saturated model on a correctly-labeled point: the gradient carries the
  // p(1-p) factor and underflows to ~0.
  Dataset train;
  train.feature_count = 1;
  train.samples.push_back({{1.0}, 1.0});
  ModelParams params{Vec{40.0}, 0.0};
  RandomStream stream(79, stream_id::kProbe);
  const VnEstimate est =
      empirical_vn_ratio(train, params, {1e-2}, 4, std::nullopt, 10, stream);
  CHECK(est.mean_vanished);
  CHECK(est.ratio == std::numeric_limits<double>::infinity());
}

TEST_CASE("resilience angle probe") {
  RandomStream stream(83, stream_id::kProbe);
  const Vec grad{0.6, -0.8};  // norm 1
  const HonestReportFn honest = [&grad](RandomStream& s) {
    Vec g = grad;
    const Vec noise = s.gaussian_vector(2, 0.05);
    for (std::size_t j = 0; j < 2; ++j) g[j] += noise[j];
    return g;
  };

  const GarSpec spec{GarKind::Mda, 5, 1};
  const AngleProbe clean =
      resilience_angle_probe(spec, std::nullopt, honest, grad, 500, stream);
  CHECK(clean.grad_norm_sq == doctest::Approx(1.0));
  CHECK(clean.rhs_at(std::numbers::pi / 6.0) ==
        doctest::Approx(0.5 * clean.grad_norm_sq).epsilon(1e-12));
  CHECK(clean.inner_product_mean == doctest::Approx(1.0).epsilon(0.05));
  CHECK(clean.ok_at(0.3));

  // A full reflection (FoE nu = 2) against plain averaging: 3 honest means
  // and 2 copies of -mean average to mean/5, so the inner product collapses
  // to ~0.2 and the angle condition fails even at alpha = 0.3.
  const AngleProbe attacked = resilience_angle_probe(
      {GarKind::Average, 5, 2}, AttackSpec::foe(2.0), honest, grad, 500, stream);
  CHECK(attacked.inner_product_mean == doctest::Approx(0.2).epsilon(0.2));
  CHECK_FALSE(attacked.ok_at(0.3));

  // MDA shrugs the same attack off: the two reflected reports form the
  // obvious outlier pair and never enter the minimum-diameter subset.
  const AngleProbe robust = resilience_angle_probe(
      spec, AttackSpec::foe(2.0), honest, grad, 500, stream);
  CHECK(robust.inner_product_mean == doctest::Approx(1.0).epsilon(0.05));
  CHECK(robust.ok_at(0.3));

  CHECK_THROWS_AS(
      resilience_angle_probe(spec, std::nullopt, honest, grad, 10, stream),
      std::invalid_argument);
  CHECK_THROWS_AS(
      resilience_angle_probe(spec, std::nullopt, honest, Vec{0.0, 0.0}, 500, stream),
      std::invalid_argument);
}
