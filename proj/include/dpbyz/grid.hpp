#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dpbyz/analyzer.hpp"
#include "dpbyz/config.hpp"

namespace dpbyz {

struct CellResult {
  Cell cell;
  std::vector<std::uint64_t> seeds;
  std::vector<MetricsSeries> series;   // one per seed
  std::vector<std::string> errors;     // non-empty marks a failed run
};

// Runs every (cell, seed) pair on the shared train/test split. Per-run
// errors are recorded in the cell and do not stop the grid. `jobs` bounds
// the number of worker threads; results do not depend on scheduling.
std::vector<CellResult> run_grid(const GridSpec& grid, const Dataset& train,
                                 const Dataset& test,
                                 const std::vector<std::uint64_t>& seeds,
                                 std::size_t jobs = 1);

// One CSV per cell plus summary.csv (mean/std across seeds per step).
// Columns: step,seed,scenario,epsilon,batch,gar,attack,train_loss,accuracy,
// vn_estimate; accuracy is empty off the eval cadence. Output is
// byte-deterministic for a fixed grid and seed list.
std::string cell_file_name(const GridSpec& grid, const Cell& cell);
void emit_csv(const GridSpec& grid, const std::vector<CellResult>& results,
              const std::string& out_dir);

struct FeasibilityRow {
  GarSpec spec;
  bool applicable = false;
  FeasibilityVerdict verdict{};  // valid only when applicable
  bool table1_ok = false;        // valid only when applicable
};

// Verdicts for a set of GARs at one (n, f, b, d, budget) query; rules whose
// preconditions fail at (n, f) are marked, not fatal.
std::vector<FeasibilityRow> feasibility_report(const std::vector<GarKind>& kinds,
                                               std::size_t n, std::size_t f,
                                               std::size_t b, std::size_t d,
                                               const PrivacyBudget& budget);
std::string feasibility_text(const std::vector<FeasibilityRow>& rows,
                             std::size_t b, std::size_t d);
std::string feasibility_csv(const std::vector<FeasibilityRow>& rows,
                            std::size_t b, std::size_t d,
                            const PrivacyBudget& budget);

}  // namespace dpbyz
