#include "dpbyz/model.hpp"

#include <cmath>
#include <stdexcept>

namespace dpbyz {

double predict(const ModelParams& params, const Vec& features) {
  if (features.size() != params.weights.size()) {
    throw std::invalid_argument("predict: feature dimension mismatch");
  }
  double z = params.bias;
  for (std::size_t j = 0; j < features.size(); ++j) {
    z += params.weights[j] * features[j];
  }
  return 1.0 / (1.0 + std::exp(-z));
}

Vec per_sample_gradient(const ModelParams& params, const Sample& sample) {
  const double p = predict(params, sample.features);
  const double factor = 2.0 * (p - sample.label) * p * (1.0 - p);
  Vec g(params.dim());
  for (std::size_t j = 0; j < sample.features.size(); ++j) {
    g[j] = factor * sample.features[j];
  }
  g.back() = factor;  // bias coordinate
  return g;
}

Vec clip(Vec g, const ClipConfig& cfg) {
  if (cfg.g_max <= 0.0 || !std::isfinite(cfg.g_max)) {
    throw std::invalid_argument("clip: g_max must be finite and > 0");
  }
  const double norm = l2_norm(g);
  if (norm > cfg.g_max) {
    const double scale = cfg.g_max / norm;
    for (double& x : g) x *= scale;
  }
  return g;
}

Vec batch_gradient(const ModelParams& params, std::span<const Sample> batch,
                   const ClipConfig& cfg) {
  if (batch.empty()) throw std::invalid_argument("batch_gradient: empty batch");
  Vec acc(params.dim(), 0.0);
  for (const Sample& sample : batch) {
    const Vec g = clip(per_sample_gradient(params, sample), cfg);
    for (std::size_t j = 0; j < acc.size(); ++j) acc[j] += g[j];
  }
  const double inv_b = 1.0 / static_cast<double>(batch.size());
  for (double& x : acc) x *= inv_b;
  return acc;
}

double mse_loss(const ModelParams& params, std::span<const Sample> samples) {
  if (samples.empty()) throw std::invalid_argument("mse_loss: empty sample list");
  double acc = 0.0;
  for (const Sample& s : samples) {
    const double r = predict(params, s.features) - s.label;
    acc += r * r;
  }
  return acc / static_cast<double>(samples.size());
}

double accuracy(const ModelParams& params, const Dataset& test) {
  if (test.empty()) throw std::invalid_argument("accuracy: empty test set");
  std::size_t correct = 0;
  for (const Sample& s : test.samples) {
    const double predicted = predict(params, s.features) >= 0.5 ? 1.0 : 0.0;
    if (predicted == s.label) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(test.size());
}

}  // namespace dpbyz
