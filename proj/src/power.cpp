#include "ponplace/power.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "ponplace/errors.hpp"

namespace ponplace {

void PowerParams::validate() const {
  if (!(p_max_w >= p_idle_w)) throw std::invalid_argument("p_max must be >= p_idle");
  if (!(p_idle_w >= 0) || !(p_transceiver_w >= 0) || !(p_onu_w >= 0))
    throw std::invalid_argument("power terms must be non-negative");
  if (!(forwarding_fraction > 0) || !(forwarding_fraction <= 1))
    throw std::invalid_argument("forwarding_fraction must be in (0, 1]");
}

double server_power(const PowerParams& params, bool active, double assigned_mips,
                    double capacity_mips) {
  if (!(capacity_mips > 0)) throw std::invalid_argument("capacity must be > 0");
  if (assigned_mips < 0) throw std::invalid_argument("assigned load must be >= 0");
  if (!active) {
    if (assigned_mips > 0)
      throw infeasible_error("load assigned to an inactive server");
    return 0.0;
  }
  if (assigned_mips > capacity_mips)
    throw infeasible_error("assigned load " + std::to_string(assigned_mips) +
                           " exceeds capacity " + std::to_string(capacity_mips));
  return (params.p_idle_w + params.p_transceiver_w) +
         (params.p_max_w - params.p_idle_w) * (assigned_mips / capacity_mips);
}

std::pair<double, double> relay_power(const PowerParams& params, bool active,
                                      double forwarded_gbps, double onu_rate_gbps) {
  if (!(onu_rate_gbps > 0)) throw std::invalid_argument("onu_rate must be > 0");
  if (forwarded_gbps < 0) throw std::invalid_argument("forwarded traffic must be >= 0");
  if (!active) {
    if (forwarded_gbps > 0)
      throw infeasible_error("traffic forwarded by an inactive relay");
    return {0.0, 0.0};
  }
  if (forwarded_gbps > onu_rate_gbps)
    throw infeasible_error("relay forwards " + std::to_string(forwarded_gbps) +
                           " Gbps over a " + std::to_string(onu_rate_gbps) + " Gbps uplink");
  const double relay_w =
      params.p_idle_w + (params.p_max_w - params.p_idle_w) * (forwarded_gbps / onu_rate_gbps);
  return {relay_w, params.p_onu_w};
}

PowerBreakdown evaluate_power(const Topology& topo, const PowerParams& params,
                              const WorkloadInstance& workload, const Placement& placement,
                              const Routing& routing) {
  params.validate();
  const int n_srv = topo.n_hosting();
  if (static_cast<int>(placement.assignment.size()) != workload.size())
    throw std::invalid_argument("assignment size does not match workload");

  std::vector<double> assigned(n_srv, 0.0);
  for (int v = 0; v < workload.size(); ++v) {
    const NodeId s = placement.assignment[v];
    if (!topo.is_hosting(s)) throw std::invalid_argument("vm assigned to non-hosting node");
    assigned[s] += workload.vms()[v].cpu_mips;
  }

  PowerBreakdown out;
  for (NodeId s = 0; s < n_srv; ++s) {
    const double w = server_power(params, placement.server_active(s), assigned[s],
                                  topo.nodes()[s].cpu_capacity_mips);
    out.per_server_w[s] = w;
    out.pp_w += w;
  }

  const auto fwd = relay_forwarded(topo, routing);
  for (int i = 0; i < topo.n_relays(); ++i) {
    const NodeId r = static_cast<NodeId>(n_srv + i);
    const auto [relay_w, onu_w] =
        relay_power(params, placement.relay_active(r), fwd[i], topo.spec().onu_rate_gbps);
    out.per_relay_w[r] = relay_w;
    out.per_onu_w[r] = onu_w;
    out.np_w += relay_w + onu_w;
  }
  out.total_w = out.pp_w + out.np_w;
  return out;
}

int max_relay_requests(const PowerParams& params) {
  return static_cast<int>(std::floor(1.0 / params.forwarding_fraction + 1e-9));
}

}  // namespace ponplace
