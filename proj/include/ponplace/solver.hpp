#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "ponplace/milp.hpp"
#include "ponplace/placement.hpp"
#include "ponplace/power.hpp"
#include "ponplace/topology.hpp"
#include "ponplace/workload.hpp"

namespace ponplace {

enum class SolveStatus { Optimal, Feasible, Infeasible };
const char* to_string(SolveStatus s);

// Objective ties within this tolerance are broken toward the lexicographically
// smallest assignment vector, which keeps solver output reproducible across
// refactors of the search order.
inline constexpr double kObjectiveTol = 1e-9;

struct SolverLimits {
  double time_limit_s = std::numeric_limits<double>::infinity();
  // Deterministic cutoff on branch-and-bound nodes; < 0 means unlimited.
  // Sweeps use this instead of the wall clock so result files are stable.
  std::int64_t node_limit = -1;

  void validate() const;  // throws std::invalid_argument
};

struct SolveReport {
  SolveStatus status = SolveStatus::Infeasible;
  std::optional<Placement> placement;  // engaged unless Infeasible
  Routing routing;
  PowerBreakdown power;
  double objective_w = 0;
  // Proven lower bound on the objective; equals objective_w when Optimal,
  // meaningful only for runs that found or bounded something.
  double lower_bound_w = 0;
  std::int64_t nodes_explored = 0;
  double wall_time_s = 0;  // informational, never written into result rows
  std::string note;        // certificate text or limit explanation
};

// Feasibility and cost of one explicit assignment: routes it, checks every
// placement/network constraint, and prices it. The replay path shared by the
// enumerative and branch-and-bound solvers, so their objectives agree bitwise.
struct AssignmentEval {
  bool feasible = false;
  std::string reason;  // first violated constraint when infeasible
  Placement placement;
  Routing routing;
  PowerBreakdown power;
  double objective_w = 0;
};
AssignmentEval evaluate_assignment(const Topology& topo, const WorkloadInstance& workload,
                                   const std::vector<NodeId>& assignment, ObjectiveMode mode,
                                   const MilpOptions& options = {},
                                   const PowerParams& params = {});

// Cheap proof that no feasible placement exists (resource totals, oversized
// VMs, or a VM whose traffic cannot be absorbed below the server rate by any
// co-location). Empty string when no proof is found.
std::string presolve_certificate(const Topology& topo, const WorkloadInstance& workload,
                                 const MilpOptions& options = {});

// Exhaustive enumeration of all S^V assignments in lexicographic order.
// Refuses instances beyond ~1e7 assignments. Reference oracle for solve_exact.
SolveReport brute_force(const Topology& topo, const WorkloadInstance& workload,
                        ObjectiveMode mode, const MilpOptions& options = {},
                        const PowerParams& params = {});

// Depth-first branch and bound over assignments with incremental constraint
// state and an admissible activation-plus-load bound. Optimal when it runs to
// completion; honors node and time limits otherwise.
SolveReport solve_exact(const Topology& topo, const WorkloadInstance& workload,
                        ObjectiveMode mode, const MilpOptions& options = {},
                        const PowerParams& params = {}, const SolverLimits& limits = {});

// Grouping + first-fit-decreasing heuristic with a bounded local repair.
// Co-locates chatty VMs when the objective includes networking power, merges
// pairs whose mutual traffic makes separation impossible, then packs groups
// onto servers by descending capacity. Returns Infeasible only with a
// certificate or after repair gives up (the note says which).
SolveReport solve_heuristic(const Topology& topo, const WorkloadInstance& workload,
                            ObjectiveMode mode, const MilpOptions& options = {},
                            const PowerParams& params = {});

}  // namespace ponplace
