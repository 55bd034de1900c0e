#pragma once

#include <string>
#include <vector>

#include "ponplace/milp.hpp"
#include "ponplace/placement.hpp"
#include "ponplace/topology.hpp"
#include "ponplace/workload.hpp"

namespace ponplace {

inline constexpr double kFeasibilityTol = 1e-9;  // absolute, documented

struct Violation {
  std::string constraint;  // family label, e.g. "C6_egress"
  std::string detail;
  double residual = 0;  // amount by which the constraint is missed
};

struct FeasibilityReport {
  bool feasible = false;
  std::vector<Violation> violations;
  // Largest absolute flow-conservation residual seen across all commodities
  // and nodes (zero when there are no commodities).
  double max_flow_residual = 0;
};

// Direct evaluation of the placement/routing constraint set (C1-C10, plus C11
// when enabled) from the data alone; no solver state is consulted and no
// routing is recomputed, which keeps this checker independent of the router.
FeasibilityReport check_feasible(const Topology& topo, const WorkloadInstance& workload,
                                 const Placement& placement, const Routing& routing,
                                 const MilpOptions& options = {},
                                 const PowerParams& params = {});

}  // namespace ponplace
