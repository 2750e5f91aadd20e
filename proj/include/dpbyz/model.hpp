#pragma once

#include <span>

#include "dpbyz/dataset.hpp"
#include "dpbyz/numerics.hpp"

namespace dpbyz {

// Logistic regression scored with mean-square-error loss. The parameter
// vector has dimension d = feature_count + 1; the bias is the last
// coordinate of every gradient.
struct ModelParams {
  Vec weights;
  double bias = 0.0;

  static ModelParams zeros(std::size_t feature_count) {
    return ModelParams{Vec(feature_count, 0.0), 0.0};
  }
  std::size_t dim() const { return weights.size() + 1; }
};

struct ClipConfig {
  double g_max;  // maximum l2 norm of a per-sample gradient, > 0
};

double predict(const ModelParams& params, const Vec& features);

// Gradient of (predict(x) - y)^2 w.r.t. (weights, bias):
// 2 (p - y) p (1 - p) * (features, 1), bias component last.
Vec per_sample_gradient(const ModelParams& params, const Sample& sample);

Vec clip(Vec g, const ClipConfig& cfg);

// Mean of per-sample gradients, each clipped before averaging (this is
// what makes the 2*g_max/b sensitivity bound hold).
Vec batch_gradient(const ModelParams& params, std::span<const Sample> batch,
                   const ClipConfig& cfg);

double mse_loss(const ModelParams& params, std::span<const Sample> samples);

// Threshold 0.5; ties (p == 0.5) classify as the positive class.
double accuracy(const ModelParams& params, const Dataset& test);

}  // namespace dpbyz
