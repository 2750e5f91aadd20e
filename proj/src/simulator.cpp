#include "dpbyz/simulator.hpp"

#include <cmath>
#include <stdexcept>

namespace dpbyz {

namespace {

bool all_finite(const Vec& v) {
  for (double x : v) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

void validate_config(const ExperimentConfig& config, const Dataset& train,
                     const Dataset& test) {
  const auto& topo = config.topology;
  if (topo.n == 0 || topo.f > topo.n) {
    throw std::invalid_argument("config: need n >= 1 and f <= n");
  }
  if (config.gar.n != topo.n || config.gar.f != topo.f) {
    throw std::invalid_argument("config: GAR spec disagrees with topology");
  }
  check_applicable(config.gar);
  if (config.batch_size == 0) throw std::invalid_argument("config: batch size must be >= 1");
  if (config.schedule.steps == 0) throw std::invalid_argument("config: steps must be >= 1");
  if (config.eval_every == 0) throw std::invalid_argument("config: eval_every must be >= 1");
  if (!(config.schedule.momentum >= 0.0 && config.schedule.momentum < 1.0)) {
    throw std::invalid_argument("config: momentum must be in [0, 1)");
  }
  if (config.budget) validate(*config.budget);
  if (train.empty()) throw std::invalid_argument("config: empty training set");
  if (test.empty()) throw std::invalid_argument("config: empty test set");
}

}  // namespace

MetricsSeries run(const ExperimentConfig& config, const Dataset& train,
                  const Dataset& test) {
  validate_config(config, train, test);

  const std::size_t n = config.topology.n;
  const std::size_t f = config.topology.f;
  const bool attacked = config.attack.kind != AttackKind::None;
  // With no attack configured the f extra workers behave honestly.
  const std::size_t honest_count = attacked ? n - f : n;
  const std::size_t dim = train.feature_count + 1;

  std::optional<NoiseCalibration> cal;
  if (config.budget) {
    cal = calibrate(*config.budget, config.clip.g_max, config.batch_size);
  }

  std::vector<RandomStream> worker_streams;
  worker_streams.reserve(honest_count);
  for (std::size_t i = 0; i < honest_count; ++i) {
    worker_streams.emplace_back(config.master_seed, i);
  }

  ModelParams params = ModelParams::zeros(train.feature_count);
  Vec momentum(dim, 0.0);
  std::vector<Vec> worker_momentum;
  if (config.schedule.momentum_site == MomentumSite::Worker) {
    worker_momentum.assign(honest_count, Vec(dim, 0.0));
  }

  MetricsSeries metrics;
  std::vector<Vec> reports(attacked ? honest_count : n);
  std::vector<Vec> pre_noise(honest_count);
  std::vector<Sample> honest_union;

  for (std::size_t t = 0; t < config.schedule.steps; ++t) {
    if (t % config.eval_every == 0) {
      metrics.accuracy.push_back(accuracy(params, test));
    }

    honest_union.clear();
    reports.resize(honest_count);
    for (std::size_t i = 0; i < honest_count; ++i) {
      Batch batch = sample_batch(train, config.batch_size, worker_streams[i]);
      Vec g = batch_gradient(params, batch, config.clip);
      if (config.schedule.momentum_site == MomentumSite::Worker) {
        Vec& m = worker_momentum[i];
        for (std::size_t j = 0; j < dim; ++j) {
          m[j] = config.schedule.momentum * m[j] + g[j];
        }
        g = m;
      }
      pre_noise[i] = g;
      reports[i] = cal ? sanitize(g, *cal, worker_streams[i]) : std::move(g);
      honest_union.insert(honest_union.end(), batch.begin(), batch.end());
    }

    metrics.train_loss.push_back(mse_loss(params, honest_union));

    if (attacked) {
      const auto& observed = config.attack_observation == AttackObservation::PostNoise
                                 ? reports
                                 : pre_noise;
      const Vec forged =
          forge(config.attack, std::span<const Vec>(observed.data(), honest_count));
      for (std::size_t i = 0; i < f; ++i) reports.push_back(forged);
    }

    const Vec agg = aggregate(config.gar, reports);

    if (config.schedule.momentum_site == MomentumSite::Server) {
      for (std::size_t j = 0; j < dim; ++j) {
        momentum[j] = config.schedule.momentum * momentum[j] + agg[j];
      }
      for (std::size_t j = 0; j < dim - 1; ++j) {
        params.weights[j] -= config.schedule.learning_rate * momentum[j];
      }
      params.bias -= config.schedule.learning_rate * momentum.back();
    } else {
      for (std::size_t j = 0; j < dim - 1; ++j) {
        params.weights[j] -= config.schedule.learning_rate * agg[j];
      }
      params.bias -= config.schedule.learning_rate * agg.back();
    }

    if (!all_finite(params.weights) || !std::isfinite(params.bias)) {
      metrics.diverged = true;
      metrics.diverged_at = t;
      return metrics;
    }
  }

  metrics.accuracy.push_back(accuracy(params, test));  // final state
  metrics.final_params = std::move(params);
  return metrics;
}

}  // namespace dpbyz
