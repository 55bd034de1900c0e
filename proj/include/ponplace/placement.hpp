#pragma once

#include <vector>

#include "ponplace/topology.hpp"
#include "ponplace/workload.hpp"

namespace ponplace {

// A complete VM-to-server assignment plus activation flags.
// Invariants: assignment.size() == n_vms; every target is a hosting server;
// active_servers is sorted, unique, and contains every server hosting a VM;
// active_relays likewise contains every relay that forwards traffic.
struct Placement {
  std::vector<NodeId> assignment;
  std::vector<NodeId> active_servers;
  std::vector<NodeId> active_relays;

  bool server_active(NodeId s) const;
  bool relay_active(NodeId r) const;
};

// Per-link flow of one server-to-server commodity. A path router emits one
// entry per path link, each carrying the full demand, but checkers accept any
// link/flow multiset (split or partial flows included).
struct CommodityFlow {
  NodeId src = -1;
  NodeId dst = -1;
  double demand_gbps = 0;
  std::vector<std::pair<int, double>> link_flows;  // (link index, Gbps)
};

struct Routing {
  std::vector<CommodityFlow> commodities;
};

// Aggregated server-to-server demand: entry s*n_hosting+d is the summed
// traffic from VMs on s to VMs on d (zero on the diagonal by construction).
std::vector<double> server_demand_matrix(const Topology& topo, const WorkloadInstance& workload,
                                         const Placement& placement);

// Routes every positive commodity along the cached minimal-hop path, in
// ascending (src, dst) order. Deterministic.
Routing route_shortest(const Topology& topo, const WorkloadInstance& workload,
                       const Placement& placement);

// Rebuilds activation flags from the assignment and routed flows: servers with
// at least one VM, relays with positive forwarded traffic.
void refresh_activation(const Topology& topo, Placement& placement, const Routing& routing);

// Traffic each relay forwards (flow departing the relay), indexed by relay
// position (relay id - n_hosting).
std::vector<double> relay_forwarded(const Topology& topo, const Routing& routing);

}  // namespace ponplace
