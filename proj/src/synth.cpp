#include "dpbyz/synth.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include "dpbyz/numerics.hpp"

namespace dpbyz {

Dataset synthesize_dataset(std::size_t samples, std::size_t features,
                           std::uint64_t seed) {
  if (features < 2) throw std::invalid_argument("synthesize_dataset: features < 2");
  RandomStream stream(seed, stream_id::kSynthData);

  // Fixed ground-truth separator direction.
  Vec truth(features);
  for (double& w : truth) w = stream.next_standard_normal();
  double norm = l2_norm(truth);
  for (double& w : truth) w /= norm;

  // Each sample is placed at a controlled angular margin from the separating
  // hyperplane: mostly easy samples far from the boundary (these make batch
  // gradients well aligned, so training converges quickly and the aggregation
  // rule sees a low variance-to-norm ratio), plus a thin band of hard samples
  // whose classification flips under small rotations of the learned
  // direction. The band makes test accuracy a sensitive probe of how
  // precisely a run has estimated the direction, not just its sign.
  constexpr double kPi = 3.14159265358979323846;
  constexpr double kHardFraction = 0.35;
  constexpr double kHardLo = 1.5 * kPi / 180.0, kHardHi = 10.0 * kPi / 180.0;
  constexpr double kEasyLo = 8.0 * kPi / 180.0, kEasyHi = 20.0 * kPi / 180.0;
  constexpr double kFlipRate = 0.05;  // baseline label noise -> loss floor

  Dataset data;
  data.feature_count = features;
  data.samples.reserve(samples);
  for (std::size_t i = 0; i < samples; ++i) {
    const double side = stream.next_uniform() <= 0.5 ? 1.0 : -1.0;
    const bool hard = stream.next_uniform() <= kHardFraction;
    const double u = stream.next_uniform();
    const double angle = hard ? kHardLo + u * (kHardHi - kHardLo)
                              : kEasyLo + u * (kEasyHi - kEasyLo);

    // Tangential component: sparse Gaussian draw, projected off `truth`.
    Vec tang(features, 0.0);
    for (std::size_t j = 0; j < features; ++j) {
      if (stream.next_uniform() <= 0.5) tang[j] = stream.next_standard_normal();
    }
    double along = 0.0;
    for (std::size_t j = 0; j < features; ++j) along += tang[j] * truth[j];
    for (std::size_t j = 0; j < features; ++j) tang[j] -= along * truth[j];
    double tang_norm = l2_norm(tang);
    if (tang_norm < 1e-12) {  // degenerate draw; fall back to an axis
      tang.assign(features, 0.0);
      tang[truth[0] * truth[0] < 0.5 ? 0 : 1] = 1.0;
      for (std::size_t j = 0; j < features; ++j) tang[j] -= truth[j] * tang[0];
      tang_norm = l2_norm(tang);
    }

    const double radius = 3.0 + 6.0 * stream.next_uniform();
    Sample s;
    s.features.assign(features, 0.0);
    const double par = radius * std::sin(angle) * side;
    const double tan_scale = radius * std::cos(angle) / tang_norm;
    for (std::size_t j = 0; j < features; ++j) {
      s.features[j] = par * truth[j] + tan_scale * tang[j];
    }
    // Near-boundary labels carry extra noise so the Bayes-optimal separator
    // has a finite, moderate sharpness: the loss plateaus early instead of
    // rewarding ever-larger parameter norms.
    const double deg = angle * 180.0 / kPi;
    const double flip_rate = kFlipRate + 0.25 * std::exp(-(deg / 3.0) * (deg / 3.0));
    const bool flip = stream.next_uniform() <= flip_rate;
    s.label = (side > 0.0) != flip ? 1.0 : 0.0;
    data.samples.push_back(std::move(s));
  }
  return data;
}

void write_sparse_file(const Dataset& data, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write dataset file: " + path);
  out << serialize_sparse(data);
}

}  // namespace dpbyz
