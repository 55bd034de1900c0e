#include "ponplace/placement.hpp"

#include <algorithm>
#include <stdexcept>

namespace ponplace {

bool Placement::server_active(NodeId s) const {
  return std::binary_search(active_servers.begin(), active_servers.end(), s);
}

bool Placement::relay_active(NodeId r) const {
  return std::binary_search(active_relays.begin(), active_relays.end(), r);
}

std::vector<double> server_demand_matrix(const Topology& topo, const WorkloadInstance& workload,
                                         const Placement& placement) {
  const int n_srv = topo.n_hosting();
  const int n_vms = workload.size();
  if (static_cast<int>(placement.assignment.size()) != n_vms)
    throw std::invalid_argument("assignment size does not match workload");
  std::vector<double> demand(static_cast<size_t>(n_srv) * n_srv, 0.0);
  for (int v = 0; v < n_vms; ++v) {
    const NodeId s = placement.assignment[v];
    if (!topo.is_hosting(s)) throw std::invalid_argument("vm assigned to non-hosting node");
    for (int o = 0; o < n_vms; ++o) {
      if (o == v) continue;
      const NodeId d = placement.assignment[o];
      if (s == d) continue;  // co-located pairs generate no fabric traffic
      demand[static_cast<size_t>(s) * n_srv + d] += workload.traffic(v, o);
    }
  }
  return demand;
}

Routing route_shortest(const Topology& topo, const WorkloadInstance& workload,
                       const Placement& placement) {
  const int n_srv = topo.n_hosting();
  const auto demand = server_demand_matrix(topo, workload, placement);
  Routing routing;
  for (NodeId s = 0; s < n_srv; ++s) {
    for (NodeId d = 0; d < n_srv; ++d) {
      const double dem = demand[static_cast<size_t>(s) * n_srv + d];
      if (dem <= 0) continue;
      CommodityFlow flow;
      flow.src = s;
      flow.dst = d;
      flow.demand_gbps = dem;
      const Route& route = topo.route(s, d);
      flow.link_flows.reserve(route.links.size());
      for (int li : route.links) flow.link_flows.emplace_back(li, dem);
      routing.commodities.push_back(std::move(flow));
    }
  }
  return routing;
}

void refresh_activation(const Topology& topo, Placement& placement, const Routing& routing) {
  placement.active_servers.clear();
  placement.active_servers.assign(placement.assignment.begin(), placement.assignment.end());
  std::sort(placement.active_servers.begin(), placement.active_servers.end());
  placement.active_servers.erase(
      std::unique(placement.active_servers.begin(), placement.active_servers.end()),
      placement.active_servers.end());

  const auto fwd = relay_forwarded(topo, routing);
  placement.active_relays.clear();
  for (int i = 0; i < topo.n_relays(); ++i)
    if (fwd[i] > 0) placement.active_relays.push_back(static_cast<NodeId>(topo.n_hosting() + i));
}

std::vector<double> relay_forwarded(const Topology& topo, const Routing& routing) {
  std::vector<double> fwd(topo.n_relays(), 0.0);
  const auto& links = topo.links();
  for (const CommodityFlow& c : routing.commodities) {
    for (const auto& [li, gbps] : c.link_flows) {
      if (li < 0 || static_cast<size_t>(li) >= links.size())
        throw std::invalid_argument("routing references unknown link");
      const NodeId from = links[li].from;
      if (topo.is_relay(from)) fwd[from - topo.n_hosting()] += gbps;
    }
  }
  return fwd;
}

}  // namespace ponplace
