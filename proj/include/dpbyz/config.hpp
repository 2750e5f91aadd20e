#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dpbyz/simulator.hpp"

namespace dpbyz {

// One curve of the experiment grid. The baseline scenario is the plain
// averaging control: gar = Average and the f extra workers behave honestly.
enum class Scenario { Baseline, NoAttack, Alie, Foe };

std::string to_string(Scenario s);
Scenario scenario_from_string(const std::string& name);

// Parsed config file: base settings plus the sweep axes (epsilon, batch,
// scenario expand to their Cartesian product).
struct GridSpec {
  TopologyConfig topology;
  ScheduleConfig schedule;
  ClipConfig clip{1e-2};

  std::vector<std::optional<double>> epsilons{std::nullopt};  // nullopt = inf
  double delta = 1e-6;

  std::string data_path;
  std::optional<std::size_t> feature_count = 68;
  std::size_t train_count = 8400;
  std::uint64_t split_seed = 1;

  std::vector<std::size_t> batches{50};
  GarKind gar = GarKind::Mda;
  std::vector<Scenario> scenarios{Scenario::NoAttack};
  double nu_alie = 1.5;
  double nu_foe = 1.1;
  AttackObservation attack_observation = AttackObservation::PostNoise;
  std::size_t eval_every = 50;
};

struct Cell {
  std::optional<double> epsilon;
  std::size_t batch;
  Scenario scenario;
};

// Sectioned key=value text; "#" and ";" start comments; comma lists on the
// sweep axes. Unknown keys and violated invariants are errors naming the key.
GridSpec parse_config(const std::string& text);
GridSpec parse_config_file(const std::string& path);

// "section.key=value" override, identical in effect to editing the file.
std::string apply_overrides(std::string text,
                            const std::vector<std::string>& overrides);

std::vector<Cell> expand(const GridSpec& grid);

// Concrete simulator config for one grid cell and seed.
ExperimentConfig make_experiment_config(const GridSpec& grid, const Cell& cell,
                                        std::uint64_t seed);

}  // namespace dpbyz
