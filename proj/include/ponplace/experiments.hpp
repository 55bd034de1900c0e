#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "ponplace/milp.hpp"
#include "ponplace/power.hpp"
#include "ponplace/solver.hpp"
#include "ponplace/topology.hpp"
#include "ponplace/workload.hpp"

namespace ponplace {

// A sweep description: fabric, power constants, workload ranges, grid axes,
// seeds, and solver budgets. Stored as JSON (docs/formats.md).
//
// Reproducibility contract: a sweep driven by a fixed config writes
// byte-identical rows.csv and derived reports on every run. Budgets are
// therefore expressed as node limits; a wall-clock limit may be set but makes
// the row content machine-dependent, so the shipped configs leave it unset.
struct ExperimentConfig {
  ArchitectureSpec architecture;
  PowerParams power;
  WorkloadRanges workload;
  MilpOptions options;

  std::vector<int> vm_counts{7, 14, 21};
  int capacity_vm_count = 7;
  // Per-scenario hosting-server capacity range; identical low/high pins every
  // server to that capacity.
  std::vector<std::pair<double, double>> capacity_scenarios{
      {6800.0, 6800.0}, {8800.0, 8800.0}, {10800.0, 10800.0}};
  std::vector<ObjectiveMode> modes{ObjectiveMode::PP, ObjectiveMode::PP_AND_NP};
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};

  double time_limit_s = std::numeric_limits<double>::infinity();
  std::int64_t node_limit = -1;
  std::map<int, std::int64_t> node_limit_per_count;  // overrides by vm count

  void validate() const;  // throws std::invalid_argument
  SolverLimits limits_for(int vm_count) const;

  static ExperimentConfig from_json_text(const std::string& text);  // throws parse_error
  static ExperimentConfig load_file(const std::string& path);
  std::string to_json_text() const;
};

// One solver run inside a sweep. pp/np/total/gap hold values only on feasible
// rows (empty fields in the CSV otherwise). `error` marks runs that raised
// instead of solving; the sweep records them and continues.
struct RunRow {
  std::string sweep;  // "vms" or "capacity"
  int vm_count = 0;
  double capacity_low_mips = 0;
  double capacity_high_mips = 0;
  std::uint64_t seed = 0;
  ObjectiveMode mode = ObjectiveMode::PP;
  SolveStatus status = SolveStatus::Infeasible;
  bool feasible = false;
  bool error = false;
  double pp_w = 0;
  double np_w = 0;
  double total_w = 0;
  double gap = 0;
  std::int64_t nodes = 0;
  std::string note;
};

std::string rows_to_csv(const std::vector<RunRow>& rows);
std::vector<RunRow> rows_from_csv(const std::string& text);  // throws parse_error

struct SweepOutcome {
  std::vector<RunRow> rows;
  // 0: ran, something feasible; 3: ran, nothing feasible; 4: some runs raised.
  int exit_code = 0;
};

// Executes the grid over (vm_count, seed, mode) on one fabric. Writes
// rows.csv, timings.csv, config.json, and the derived reports into out_dir.
SweepOutcome run_vm_sweep(const ExperimentConfig& config, const std::string& out_dir);

// Executes the grid over (capacity scenario, seed, mode) at a fixed VM count.
// The workload for a seed is identical across scenarios.
SweepOutcome run_capacity_sweep(const ExperimentConfig& config, const std::string& out_dir);

// Recomputes aggregates.csv, reductions.csv, and summary.json from rows
// alone. Pure in the rows, so re-running it is byte-idempotent.
void write_derived_reports(const std::string& out_dir, const std::vector<RunRow>& rows);

// `report` entry point: re-derive reports for an existing sweep directory.
// Returns the exit code recomputed from the rows.
int reaggregate_dir(const std::string& out_dir);

}  // namespace ponplace
