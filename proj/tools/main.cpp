// Command-line front end: simulation, experiment grids, feasibility
// reports, rate-bound calculators, and the mean-estimation testbed.

#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "dpbyz/analyzer.hpp"
#include "dpbyz/config.hpp"
#include "dpbyz/grid.hpp"
#include "dpbyz/synth.hpp"

namespace {

using namespace dpbyz;

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// "1..5" or "1,2,3"
std::vector<std::uint64_t> parse_seeds(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  if (const auto dots = text.find(".."); dots != std::string::npos) {
    const std::uint64_t lo = std::stoull(text.substr(0, dots));
    const std::uint64_t hi = std::stoull(text.substr(dots + 2));
    if (hi < lo) throw std::invalid_argument("seed range is empty: " + text);
    for (std::uint64_t s = lo; s <= hi; ++s) seeds.push_back(s);
    return seeds;
  }
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) seeds.push_back(std::stoull(item));
  }
  if (seeds.empty()) throw std::invalid_argument("empty seed list: " + text);
  return seeds;
}

std::pair<Dataset, Dataset> load_split(const GridSpec& grid) {
  if (grid.data_path.empty()) {
    throw std::invalid_argument("config key 'data.path': required for simulation");
  }
  const Dataset full = parse_sparse_file(grid.data_path, grid.feature_count);
  RandomStream split_stream(grid.split_seed, stream_id::kSplit);
  return split(full, grid.train_count, split_stream);
}

int run_cells(const std::string& config_path,
              const std::vector<std::string>& overrides,
              const std::vector<std::uint64_t>& seeds, const std::string& out_dir,
              std::size_t jobs) {
  const GridSpec grid =
      parse_config(apply_overrides(read_file(config_path), overrides));
  const auto [train, test] = load_split(grid);
  const auto results = run_grid(grid, train, test, seeds, jobs);
  emit_csv(grid, results, out_dir);
  std::size_t failed = 0;
  for (const CellResult& r : results) {
    for (std::size_t si = 0; si < r.seeds.size(); ++si) {
      if (r.errors[si].empty()) continue;
      ++failed;
      std::cerr << "error: cell " << cell_file_name(grid, r.cell) << " seed "
                << r.seeds[si] << ": " << r.errors[si] << "\n";
    }
  }
  std::cout << results.size() << " cells x " << seeds.size() << " seeds -> "
            << out_dir << (failed ? " (with failed runs)" : "") << "\n";
  return failed == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Distributed SGD under differential privacy and Byzantine attack"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = "out";
  std::string seeds_text = "1";
  std::vector<std::string> overrides;
  std::size_t jobs = std::max(1u, std::thread::hardware_concurrency());

  auto* simulate = app.add_subcommand("simulate", "run the configured cells at one seed");
  simulate->add_option("--config", config_path)->required();
  std::uint64_t seed = 1;
  simulate->add_option("--seed", seed);
  simulate->add_option("--out", out_dir);
  simulate->add_option("--set", overrides, "override as section.key=value");

  auto* grid_cmd = app.add_subcommand("grid", "run the full grid across seeds");
  grid_cmd->add_option("--config", config_path)->required();
  grid_cmd->add_option("--seeds", seeds_text, "e.g. 1..5 or 1,2,3");
  grid_cmd->add_option("--out", out_dir);
  grid_cmd->add_option("--jobs", jobs);
  grid_cmd->add_option("--set", overrides, "override as section.key=value");

  auto* feas = app.add_subcommand("feasibility", "VN-ratio feasibility verdicts");
  std::string gar_name = "all";
  std::size_t n = 11, f = 5, b = 50, d = 69;
  double epsilon = 0.2, delta = 1e-6;
  std::string csv_out;
  feas->add_option("--gar", gar_name, "rule name or 'all'");
  feas->add_option("--n", n);
  feas->add_option("--f", f);
  feas->add_option("--b", b);
  feas->add_option("--d", d);
  feas->add_option("--epsilon", epsilon);
  feas->add_option("--delta", delta);
  feas->add_option("--out", csv_out, "also write a CSV report here");

  auto* bounds = app.add_subcommand("bounds", "Theorem upper/lower rate bounds");
  RateBoundQuery q{1.0, 1.0, 0.0, 1.0, 1.0, 50, 69, 1000, 0.0, 1e-2};
  bounds->add_option("--mu", q.mu);
  bounds->add_option("--lambda", q.lambda);
  bounds->add_option("--alpha", q.alpha);
  bounds->add_option("--c", q.c);
  bounds->add_option("--sigma", q.sigma);
  bounds->add_option("--b", q.b);
  bounds->add_option("--d", q.d);
  bounds->add_option("--T", q.steps);
  bounds->add_option("--s", q.noise_std);
  bounds->add_option("--g-max", q.g_max);

  auto* testbed = app.add_subcommand("testbed", "quadratic mean-estimation testbed");
  std::size_t tb_d = 100, tb_b = 10, tb_T = 100, tb_trials = 1000;
  double tb_sigma = 1.0, tb_s = 0.01;
  std::uint64_t tb_seed = 1;
  testbed->add_option("--d", tb_d);
  testbed->add_option("--sigma", tb_sigma);
  testbed->add_option("--b", tb_b);
  testbed->add_option("--T", tb_T);
  testbed->add_option("--s", tb_s);
  testbed->add_option("--trials", tb_trials);
  testbed->add_option("--seed", tb_seed);

  auto* synth = app.add_subcommand("synth", "write a synthetic sparse dataset");
  std::string synth_out = "data/synthetic.svm";
  std::size_t synth_samples = 11055, synth_features = 68;
  std::uint64_t synth_seed = 42;
  synth->add_option("--out", synth_out);
  synth->add_option("--samples", synth_samples);
  synth->add_option("--features", synth_features);
  synth->add_option("--seed", synth_seed);

  CLI11_PARSE(app, argc, argv);

  try {
    if (simulate->parsed()) {
      return run_cells(config_path, overrides, {seed}, out_dir, jobs);
    }
    if (grid_cmd->parsed()) {
      return run_cells(config_path, overrides, parse_seeds(seeds_text), out_dir, jobs);
    }
    if (feas->parsed()) {
      std::vector<GarKind> kinds;
      if (gar_name == "all") {
        kinds = {GarKind::Mda,    GarKind::Krum,   GarKind::Bulyan,
                 GarKind::Median, GarKind::Meamed, GarKind::Phocas,
                 GarKind::TrimmedMean};
      } else {
        kinds = {gar_kind_from_string(gar_name)};
      }
      const PrivacyBudget budget{epsilon, delta};
      const auto rows = feasibility_report(kinds, n, f, b, d, budget);
      std::cout << feasibility_text(rows, b, d);
      if (!csv_out.empty()) {
        std::ofstream out(csv_out, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write: " + csv_out);
        out << feasibility_csv(rows, b, d, budget);
      }
      return 0;
    }
    if (bounds->parsed()) {
      std::printf("upper_bound %.10g\n", theorem_upper_bound(q));
      std::printf("lower_bound %.10g\n",
                  theorem_lower_bound(q.sigma, q.b, q.d, q.steps, q.noise_std));
      return 0;
    }
    if (testbed->parsed()) {
      RandomStream stream(tb_seed, stream_id::kTestbed);
      const TestbedResult r =
          quadratic_testbed(tb_d, tb_sigma, tb_b, tb_T, tb_s, tb_trials, stream);
      std::printf("empirical_error %.10g\npredicted_error %.10g\n",
                  r.empirical_error, r.predicted_error);
      return 0;
    }
    if (synth->parsed()) {
      write_sparse_file(synthesize_dataset(synth_samples, synth_features, synth_seed),
                        synth_out);
      std::cout << "wrote " << synth_samples << " samples to " << synth_out << "\n";
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
