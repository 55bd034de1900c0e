#pragma once

#include <map>
#include <utility>

#include "ponplace/placement.hpp"
#include "ponplace/topology.hpp"
#include "ponplace/workload.hpp"

namespace ponplace {

// Reference power constants: 301 W peak, 201 W idle, 1 W transceiver,
// 2.5 W ONU, 5% forwarding overhead per relayed request.
struct PowerParams {
  double p_max_w = 301.0;
  double p_idle_w = 201.0;
  double p_transceiver_w = 1.0;
  double p_onu_w = 2.5;
  double forwarding_fraction = 0.05;

  void validate() const;  // throws std::invalid_argument
};

struct PowerBreakdown {
  std::map<NodeId, double> per_server_w;
  std::map<NodeId, double> per_relay_w;
  std::map<NodeId, double> per_onu_w;
  double pp_w = 0;     // processing power (hosting servers)
  double np_w = 0;     // networking power (relays + ONUs)
  double total_w = 0;  // pp_w + np_w exactly
};

// Idle-plus-proportional server model. Inactive servers draw nothing; an
// active server draws idle plus transceiver power plus a linear term in its
// assigned load. assigned > 0 on an inactive server or assigned > capacity is
// a contract breach and throws infeasible_error.
double server_power(const PowerParams& params, bool active, double assigned_mips,
                    double capacity_mips);

// Relay draw as (relay watts, onu watts). Inactive relays draw nothing and
// must forward nothing. The proportional term scales with forwarded traffic
// over the relay uplink rate; forwarding above the uplink rate is a breach.
std::pair<double, double> relay_power(const PowerParams& params, bool active,
                                      double forwarded_gbps, double onu_rate_gbps);

// Full breakdown for a placed and routed solution. Propagates the contract
// breaches above (e.g. a VM on a server missing from active_servers).
PowerBreakdown evaluate_power(const Topology& topo, const PowerParams& params,
                              const WorkloadInstance& workload, const Placement& placement,
                              const Routing& routing);

// Distinct flows a relay may forward under the optional request cap:
// floor(1 / forwarding_fraction), nudged so fractions that invert to an
// integer are not truncated by floating-point rounding.
int max_relay_requests(const PowerParams& params);

}  // namespace ponplace
