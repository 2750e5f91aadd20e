#include "dpbyz/config.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace dpbyz {

std::string to_string(Scenario s) {
  switch (s) {
    case Scenario::Baseline: return "baseline";
    case Scenario::NoAttack: return "no_attack";
    case Scenario::Alie: return "alie";
    case Scenario::Foe: return "foe";
  }
  throw std::logic_error("unknown Scenario");
}

Scenario scenario_from_string(const std::string& name) {
  if (name == "baseline") return Scenario::Baseline;
  if (name == "no_attack" || name == "noattack" || name == "none") return Scenario::NoAttack;
  if (name == "alie") return Scenario::Alie;
  if (name == "foe") return Scenario::Foe;
  throw std::invalid_argument("unknown scenario: " + name);
}

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0;
  std::size_t b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

[[noreturn]] void key_error(const std::string& key, const std::string& what) {
  throw std::invalid_argument("config key '" + key + "': " + what);
}

double parse_double(const std::string& key, const std::string& value) {
  char* end = nullptr;
  const double x = std::strtod(value.c_str(), &end);
  if (end == value.c_str() || *end != '\0' || !std::isfinite(x)) {
    key_error(key, "expected a number, got '" + value + "'");
  }
  return x;
}

std::uint64_t parse_uint(const std::string& key, const std::string& value) {
  try {
    std::size_t consumed = 0;
    const unsigned long long x = std::stoull(value, &consumed);
    if (consumed != value.size()) throw std::invalid_argument(value);
    return x;
  } catch (const std::logic_error&) {
    key_error(key, "expected a non-negative integer, got '" + value + "'");
  }
}

using SectionMap = std::map<std::string, std::map<std::string, std::string>>;

SectionMap parse_sections(const std::string& text) {
  SectionMap sections;
  std::istringstream in(text);
  std::string line;
  std::string current = "";
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    for (char c : {'#', ';'}) {
      if (auto pos = line.find(c); pos != std::string::npos) line.erase(pos);
    }
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw std::invalid_argument("config line " + std::to_string(line_no) +
                                    ": unterminated section header");
      }
      current = trim(line.substr(1, line.size() - 2));
      sections[current];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config line " + std::to_string(line_no) +
                                  ": expected key = value");
    }
    sections[current][trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return sections;
}

GridSpec from_sections(const SectionMap& sections) {
  GridSpec grid;
  for (const auto& [section, entries] : sections) {
    for (const auto& [key, value] : entries) {
      const std::string qualified = section.empty() ? key : section + "." + key;
      if (qualified == "topology.n") {
        grid.topology.n = parse_uint(qualified, value);
      } else if (qualified == "topology.f") {
        grid.topology.f = parse_uint(qualified, value);
      } else if (qualified == "schedule.steps") {
        grid.schedule.steps = parse_uint(qualified, value);
      } else if (qualified == "schedule.learning_rate") {
        grid.schedule.learning_rate = parse_double(qualified, value);
      } else if (qualified == "schedule.momentum") {
        grid.schedule.momentum = parse_double(qualified, value);
      } else if (qualified == "schedule.momentum_site") {
        if (value == "server") grid.schedule.momentum_site = MomentumSite::Server;
        else if (value == "worker") grid.schedule.momentum_site = MomentumSite::Worker;
        else key_error(qualified, "must be 'server' or 'worker'");
      } else if (qualified == "privacy.epsilon") {
        grid.epsilons.clear();
        for (const std::string& item : split_list(value)) {
          if (item == "inf") {
            grid.epsilons.push_back(std::nullopt);
          } else {
            const double eps = parse_double(qualified, item);
            if (!(eps > 0.0 && eps < 1.0)) {
              key_error(qualified, "epsilon must be in (0,1) or 'inf'");
            }
            grid.epsilons.push_back(eps);
          }
        }
        if (grid.epsilons.empty()) key_error(qualified, "empty list");
      } else if (qualified == "privacy.delta") {
        grid.delta = parse_double(qualified, value);
        if (!(grid.delta > 0.0 && grid.delta < 1.0)) {
          key_error(qualified, "delta must be in (0,1)");
        }
      } else if (qualified == "data.path") {
        grid.data_path = value;
      } else if (qualified == "data.feature_count") {
        if (value == "auto") grid.feature_count = std::nullopt;
        else grid.feature_count = parse_uint(qualified, value);
      } else if (qualified == "data.train_count") {
        grid.train_count = parse_uint(qualified, value);
      } else if (qualified == "data.split_seed") {
        grid.split_seed = parse_uint(qualified, value);
      } else if (qualified == "run.batch") {
        grid.batches.clear();
        for (const std::string& item : split_list(value)) {
          const std::uint64_t b = parse_uint(qualified, item);
          if (b == 0) key_error(qualified, "batch size must be >= 1");
          grid.batches.push_back(b);
        }
        if (grid.batches.empty()) key_error(qualified, "empty list");
      } else if (qualified == "run.gar") {
        grid.gar = gar_kind_from_string(value);
      } else if (qualified == "run.scenario") {
        grid.scenarios.clear();
        for (const std::string& item : split_list(value)) {
          grid.scenarios.push_back(scenario_from_string(item));
        }
        if (grid.scenarios.empty()) key_error(qualified, "empty list");
      } else if (qualified == "run.nu_alie") {
        grid.nu_alie = parse_double(qualified, value);
      } else if (qualified == "run.nu_foe") {
        grid.nu_foe = parse_double(qualified, value);
      } else if (qualified == "run.attack_observe") {
        if (value == "post_noise") grid.attack_observation = AttackObservation::PostNoise;
        else if (value == "pre_noise") grid.attack_observation = AttackObservation::PreNoise;
        else key_error(qualified, "must be 'post_noise' or 'pre_noise'");
      } else if (qualified == "run.eval_every") {
        grid.eval_every = parse_uint(qualified, value);
        if (grid.eval_every == 0) key_error(qualified, "must be >= 1");
      } else if (qualified == "run.g_max") {
        grid.clip.g_max = parse_double(qualified, value);
        if (!(grid.clip.g_max > 0.0)) key_error(qualified, "g_max must be > 0");
      } else {
        key_error(qualified, "unknown key");
      }
    }
  }
  if (grid.topology.f > grid.topology.n) {
    throw std::invalid_argument("config: topology.f exceeds topology.n");
  }
  return grid;
}

}  // namespace

GridSpec parse_config(const std::string& text) {
  return from_sections(parse_sections(text));
}

GridSpec parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string apply_overrides(std::string text,
                            const std::vector<std::string>& overrides) {
  for (const std::string& item : overrides) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("override '" + item + "': expected section.key=value");
    }
    const std::string qualified = trim(item.substr(0, eq));
    const auto dot = qualified.find('.');
    if (dot == std::string::npos) {
      throw std::invalid_argument("override '" + item + "': expected section.key=value");
    }
    text += "\n[" + qualified.substr(0, dot) + "]\n" + qualified.substr(dot + 1) +
            " = " + trim(item.substr(eq + 1)) + "\n";
  }
  return text;
}

std::vector<Cell> expand(const GridSpec& grid) {
  std::vector<Cell> cells;
  for (const auto& eps : grid.epsilons) {
    for (std::size_t b : grid.batches) {
      for (Scenario s : grid.scenarios) {
        cells.push_back(Cell{eps, b, s});
      }
    }
  }
  return cells;
}

ExperimentConfig make_experiment_config(const GridSpec& grid, const Cell& cell,
                                        std::uint64_t seed) {
  ExperimentConfig config;
  config.topology = grid.topology;
  config.schedule = grid.schedule;
  config.batch_size = cell.batch;
  config.clip = grid.clip;
  config.eval_every = grid.eval_every;
  config.master_seed = seed;
  config.attack_observation = grid.attack_observation;
  if (cell.epsilon) {
    config.budget = PrivacyBudget{*cell.epsilon, grid.delta};
  }
  switch (cell.scenario) {
    case Scenario::Baseline:
      config.gar = GarSpec{GarKind::Average, grid.topology.n, grid.topology.f};
      config.attack = AttackSpec::none();
      break;
    case Scenario::NoAttack:
      config.gar = GarSpec{grid.gar, grid.topology.n, grid.topology.f};
      config.attack = AttackSpec::none();
      break;
    case Scenario::Alie:
      config.gar = GarSpec{grid.gar, grid.topology.n, grid.topology.f};
      config.attack = AttackSpec::alie(grid.nu_alie);
      break;
    case Scenario::Foe:
      config.gar = GarSpec{grid.gar, grid.topology.n, grid.topology.f};
      config.attack = AttackSpec::foe(grid.nu_foe);
      break;
  }
  return config;
}

}  // namespace dpbyz
