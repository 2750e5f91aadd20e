#include "dpbyz/grid.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <thread>

namespace dpbyz {

namespace {

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::string epsilon_label(const std::optional<double>& eps) {
  if (!eps) return "inf";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", *eps);
  return buf;
}

std::string attack_label(Scenario s) {
  switch (s) {
    case Scenario::Alie: return to_string(AttackKind::Alie);
    case Scenario::Foe: return to_string(AttackKind::Foe);
    default: return to_string(AttackKind::None);
  }
}

std::string gar_label(const GridSpec& grid, Scenario s) {
  return s == Scenario::Baseline ? to_string(GarKind::Average)
                                 : to_string(grid.gar);
}

}  // namespace

std::vector<CellResult> run_grid(const GridSpec& grid, const Dataset& train,
                                 const Dataset& test,
                                 const std::vector<std::uint64_t>& seeds,
                                 std::size_t jobs) {
  if (seeds.empty()) throw std::invalid_argument("run_grid: empty seed list");
  const std::vector<Cell> cells = expand(grid);
  std::vector<CellResult> results(cells.size());
  for (std::size_t i = 0; i < cells.size(); ++i) {
    results[i].cell = cells[i];
    results[i].seeds = seeds;
    results[i].series.resize(seeds.size());
    results[i].errors.resize(seeds.size());
  }

  const std::size_t total = cells.size() * seeds.size();
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t task = next.fetch_add(1); task < total;
         task = next.fetch_add(1)) {
      const std::size_t cell_idx = task / seeds.size();
      const std::size_t seed_idx = task % seeds.size();
      try {
        const ExperimentConfig config =
            make_experiment_config(grid, cells[cell_idx], seeds[seed_idx]);
        results[cell_idx].series[seed_idx] = run(config, train, test);
      } catch (const std::exception& e) {
        results[cell_idx].errors[seed_idx] = e.what();
      }
    }
  };

  if (jobs <= 1 || total <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t i = 0; i < std::min(jobs, total); ++i) {
      pool.emplace_back(worker);
    }
    for (std::thread& t : pool) t.join();
  }
  return results;
}

std::string cell_file_name(const GridSpec&, const Cell& cell) {
  return "e_" + epsilon_label(cell.epsilon) + "-b_" + std::to_string(cell.batch) +
         "-" + to_string(cell.scenario) + ".csv";
}

void emit_csv(const GridSpec& grid, const std::vector<CellResult>& results,
              const std::string& out_dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);

  const char* header =
      "step,seed,scenario,epsilon,batch,gar,attack,train_loss,accuracy,vn_estimate\n";

  for (const CellResult& result : results) {
    const Cell& cell = result.cell;
    const std::string path = out_dir + "/" + cell_file_name(grid, cell);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write CSV file: " + path);
    out << header;
    const std::string tag = to_string(cell.scenario) + "," +
                            epsilon_label(cell.epsilon) + "," +
                            std::to_string(cell.batch) + "," +
                            gar_label(grid, cell.scenario) + "," +
                            attack_label(cell.scenario);
    for (std::size_t si = 0; si < result.seeds.size(); ++si) {
      if (!result.errors[si].empty()) continue;  // failed cells marked in summary
      const MetricsSeries& m = result.series[si];
      const std::string seed = std::to_string(result.seeds[si]);
      for (std::size_t t = 0; t < m.train_loss.size(); ++t) {
        out << t << ',' << seed << ',' << tag << ',' << fmt(m.train_loss[t]) << ',';
        if (t % grid.eval_every == 0 && t / grid.eval_every < m.accuracy.size()) {
          out << fmt(m.accuracy[t / grid.eval_every]);
        }
        out << ",\n";
      }
      // final parameter state carries the endpoint accuracy, no step loss
      if (!m.diverged && !m.accuracy.empty()) {
        out << m.train_loss.size() << ',' << seed << ',' << tag << ",,"
            << fmt(m.accuracy.back()) << ",\n";
      }
    }
  }

  const std::string summary_path = out_dir + "/summary.csv";
  std::ofstream out(summary_path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write CSV file: " + summary_path);
  out << "scenario,epsilon,batch,gar,attack,step,seed_count,failed_count,"
         "loss_mean,loss_std,accuracy_mean,accuracy_std\n";
  for (const CellResult& result : results) {
    const Cell& cell = result.cell;
    const std::string tag = to_string(cell.scenario) + "," +
                            epsilon_label(cell.epsilon) + "," +
                            std::to_string(cell.batch) + "," +
                            gar_label(grid, cell.scenario) + "," +
                            attack_label(cell.scenario);
    std::size_t failed = 0;
    std::size_t max_steps = 0;
    std::size_t max_evals = 0;
    for (std::size_t si = 0; si < result.seeds.size(); ++si) {
      if (!result.errors[si].empty()) {
        ++failed;
        continue;
      }
      max_steps = std::max(max_steps, result.series[si].train_loss.size());
      max_evals = std::max(max_evals, result.series[si].accuracy.size());
    }
    const std::size_t final_step = max_evals > 0 ? (max_evals - 1) * grid.eval_every : 0;
    for (std::size_t t = 0; t <= std::max(max_steps, final_step); ++t) {
      double loss_sum = 0.0, loss_sq = 0.0, acc_sum = 0.0, acc_sq = 0.0;
      std::size_t loss_n = 0, acc_n = 0;
      for (std::size_t si = 0; si < result.seeds.size(); ++si) {
        if (!result.errors[si].empty()) continue;
        const MetricsSeries& m = result.series[si];
        if (t < m.train_loss.size()) {
          loss_sum += m.train_loss[t];
          loss_sq += m.train_loss[t] * m.train_loss[t];
          ++loss_n;
        }
        if (t % grid.eval_every == 0 && t / grid.eval_every < m.accuracy.size()) {
          const double a = m.accuracy[t / grid.eval_every];
          acc_sum += a;
          acc_sq += a * a;
          ++acc_n;
        }
      }
      if (loss_n == 0 && acc_n == 0) continue;
      out << tag << ',' << t << ',' << result.seeds.size() << ',' << failed << ',';
      if (loss_n > 0) {
        const double mean = loss_sum / loss_n;
        out << fmt(mean) << ','
            << fmt(std::sqrt(std::max(0.0, loss_sq / loss_n - mean * mean)));
      } else {
        out << ',';
      }
      out << ',';
      if (acc_n > 0) {
        const double mean = acc_sum / acc_n;
        out << fmt(mean) << ','
            << fmt(std::sqrt(std::max(0.0, acc_sq / acc_n - mean * mean)));
      } else {
        out << ',';
      }
      out << '\n';
    }
  }
}

std::vector<FeasibilityRow> feasibility_report(const std::vector<GarKind>& kinds,
                                               std::size_t n, std::size_t f,
                                               std::size_t b, std::size_t d,
                                               const PrivacyBudget& budget) {
  std::vector<FeasibilityRow> rows;
  for (GarKind kind : kinds) {
    FeasibilityRow row;
    row.spec = GarSpec{kind, n, f};
    row.applicable = kind != GarKind::Average && applicable(row.spec);
    if (row.applicable) {
      row.verdict = vn_feasibility(FeasibilityQuery{row.spec, b, d, budget});
      row.table1_ok = table1_condition(row.spec, b, d, budget);
    }
    rows.push_back(row);
  }
  return rows;
}

std::string feasibility_text(const std::vector<FeasibilityRow>& rows,
                             std::size_t b, std::size_t d) {
  std::string out;
  char buf[256];
  std::snprintf(buf, sizeof(buf), "%-13s %-11s %-9s %-11s %-11s %-11s %s\n",
                "gar", "vn_holds", "table1", "1/k_F", "threshold", "min_batch",
                "max_f/n");
  out += buf;
  for (const FeasibilityRow& row : rows) {
    if (!row.applicable) {
      std::snprintf(buf, sizeof(buf), "%-13s inapplicable at (n=%zu, f=%zu)\n",
                    to_string(row.spec.kind).c_str(), row.spec.n, row.spec.f);
      out += buf;
      continue;
    }
    const std::string min_batch =
        row.verdict.min_batch ? std::to_string(*row.verdict.min_batch)
                              : "none<=cap";
    std::snprintf(buf, sizeof(buf), "%-13s %-11s %-9s %-11.5g %-11.5g %-11s %.4f\n",
                  to_string(row.spec.kind).c_str(),
                  row.verdict.vn_can_hold ? "yes" : "no",
                  row.table1_ok ? "yes" : "no", row.verdict.inverse_kf,
                  row.verdict.threshold, min_batch.c_str(),
                  row.verdict.max_byz_fraction);
    out += buf;
  }
  (void)b;
  (void)d;
  return out;
}

std::string feasibility_csv(const std::vector<FeasibilityRow>& rows,
                            std::size_t b, std::size_t d,
                            const PrivacyBudget& budget) {
  std::string out =
      "gar,n,f,b,d,epsilon,delta,applicable,vn_can_hold,table1_ok,"
      "c_constant,threshold,inverse_kf,min_batch,max_byz_fraction\n";
  for (const FeasibilityRow& row : rows) {
    out += to_string(row.spec.kind) + "," + std::to_string(row.spec.n) + "," +
           std::to_string(row.spec.f) + "," + std::to_string(b) + "," +
           std::to_string(d) + "," + fmt(budget.epsilon) + "," +
           fmt(budget.delta) + ",";
    if (!row.applicable) {
      out += "no,,,,,,,\n";
      continue;
    }
    out += "yes,";
    out += row.verdict.vn_can_hold ? "yes," : "no,";
    out += row.table1_ok ? "yes," : "no,";
    out += fmt(row.verdict.c_constant) + "," + fmt(row.verdict.threshold) + "," +
           fmt(row.verdict.inverse_kf) + ",";
    out += row.verdict.min_batch ? std::to_string(*row.verdict.min_batch) : "";
    out += "," + fmt(row.verdict.max_byz_fraction) + "\n";
  }
  return out;
}

}  // namespace dpbyz
