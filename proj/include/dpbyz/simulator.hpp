#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dpbyz/attack.hpp"
#include "dpbyz/dataset.hpp"
#include "dpbyz/gar.hpp"
#include "dpbyz/model.hpp"
#include "dpbyz/privacy.hpp"

namespace dpbyz {

struct TopologyConfig {
  std::size_t n = 11;
  std::size_t f = 5;  // Byzantine worker ids are n-f .. n-1
};

enum class MomentumSite { Server, Worker };

struct ScheduleConfig {
  std::size_t steps = 1000;
  double learning_rate = 2.0;
  double momentum = 0.99;
  // Worker-side momentum by default: each worker accumulates its own momentum
  // and privacy noise is added to the submission only, so the noise is not
  // amplified by the 1/(1-beta) momentum gain. Server-side momentum over noisy
  // raw gradients is kept as an ablation; at beta = 0.99 it multiplies the
  // injected noise's effect on the iterates by two orders of magnitude and
  // destroys training even without an attack.
  MomentumSite momentum_site = MomentumSite::Worker;
};

// What the attacker observes when forging: the honest workers' submitted
// (post-noise) gradients by default, or the pre-noise gradients for ablation.
enum class AttackObservation { PostNoise, PreNoise };

struct ExperimentConfig {
  TopologyConfig topology;
  ScheduleConfig schedule;
  std::size_t batch_size = 50;
  GarSpec gar{GarKind::Mda, 11, 5};
  AttackSpec attack = AttackSpec::none();
  AttackObservation attack_observation = AttackObservation::PostNoise;
  std::optional<PrivacyBudget> budget;  // none = no noise
  ClipConfig clip{1e-2};
  std::uint64_t master_seed = 1;
  std::size_t eval_every = 50;
};

struct MetricsSeries {
  // Loss at w_t on the union of honest workers' batches of step t, recorded
  // before the update; length T (truncated on divergence).
  std::vector<double> train_loss;
  // Test accuracy at parameter states 0, eval_every, ..., plus the final
  // state; length floor(T / eval_every) + 1 for a completed run.
  std::vector<double> accuracy;
  bool diverged = false;
  std::size_t diverged_at = 0;
  // Model state after the last completed step (empty if the run diverged).
  ModelParams final_params;
};

// One full parameter-server training run. `train` and `test` are the fixed
// experiment split; the run only consumes streams derived from
// config.master_seed, so identical configs replay bit-identically.
MetricsSeries run(const ExperimentConfig& config, const Dataset& train,
                  const Dataset& test);

}  // namespace dpbyz
