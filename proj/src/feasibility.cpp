#include "ponplace/feasibility.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "ponplace/text_io.hpp"

namespace ponplace {

namespace {

std::string node_name(const Topology& topo, NodeId id) {
  if (id >= 0 && static_cast<size_t>(id) < topo.nodes().size()) return topo.nodes()[id].name;
  return "node" + std::to_string(id);
}

}  // namespace

FeasibilityReport check_feasible(const Topology& topo, const WorkloadInstance& workload,
                                 const Placement& placement, const Routing& routing,
                                 const MilpOptions& options, const PowerParams& params) {
  FeasibilityReport rep;
  auto violate = [&](const std::string& family, const std::string& detail, double residual) {
    rep.violations.push_back({family, detail, residual});
  };

  const int n = workload.size();
  const int S = topo.n_hosting();
  const double tol = kFeasibilityTol;

  // C1: one server per VM.
  if (static_cast<int>(placement.assignment.size()) != n) {
    violate("C1_assign",
            "assignment has " + std::to_string(placement.assignment.size()) +
                " entries for " + std::to_string(n) + " VMs",
            std::fabs(static_cast<double>(placement.assignment.size()) - n));
    rep.feasible = false;
    return rep;  // nothing else is well-defined
  }
  for (int v = 0; v < n; ++v) {
    if (!topo.is_hosting(placement.assignment[v])) {
      violate("C1_assign", "vm " + std::to_string(v) + " is not on a hosting server", 1.0);
      rep.feasible = false;
      return rep;
    }
  }

  // C9 / C10: server resources and activation linking.
  std::vector<double> cpu_used(S, 0.0), ram_used(S, 0.0);
  for (int v = 0; v < n; ++v) {
    const NodeId s = placement.assignment[v];
    cpu_used[s] += workload.vms()[v].cpu_mips;
    ram_used[s] += workload.vms()[v].ram_gb;
    if (!placement.server_active(s))
      violate("C10_activation",
              "vm " + std::to_string(v) + " on inactive server " + node_name(topo, s), 1.0);
  }
  for (NodeId s = 0; s < S; ++s) {
    const Node& srv = topo.nodes()[s];
    if (cpu_used[s] > srv.cpu_capacity_mips + tol)
      violate("C9_cpu",
              node_name(topo, s) + " load " + fmt_double(cpu_used[s]) + " MIPS > capacity " +
                  fmt_double(srv.cpu_capacity_mips),
              cpu_used[s] - srv.cpu_capacity_mips);
    if (ram_used[s] > srv.ram_capacity_gb + tol)
      violate("C9_ram",
              node_name(topo, s) + " ram " + fmt_double(ram_used[s]) + " GB > capacity " +
                  fmt_double(srv.ram_capacity_gb),
              ram_used[s] - srv.ram_capacity_gb);
  }

  // Demand matrix recomputed here from the assignment alone (independent of
  // the router and of server_demand_matrix).
  std::vector<double> demand(static_cast<size_t>(S) * S, 0.0);
  for (int v = 0; v < n; ++v)
    for (int o = 0; o < n; ++o) {
      if (o == v) continue;
      const NodeId s = placement.assignment[v];
      const NodeId d = placement.assignment[o];
      if (s != d) demand[static_cast<size_t>(s) * S + d] += workload.traffic(v, o);
    }

  // C3: routed commodities must match the aggregated demand, one entry per
  // positive (s, d) pair.
  std::map<std::pair<NodeId, NodeId>, const CommodityFlow*> by_pair;
  for (const CommodityFlow& c : routing.commodities) {
    if (!topo.is_hosting(c.src) || !topo.is_hosting(c.dst) || c.src == c.dst) {
      violate("C3_demand", "commodity endpoints invalid", 1.0);
      continue;
    }
    if (!by_pair.emplace(std::make_pair(c.src, c.dst), &c).second)
      violate("C3_demand",
              "duplicate commodity " + node_name(topo, c.src) + "->" + node_name(topo, c.dst),
              1.0);
  }
  for (NodeId s = 0; s < S; ++s)
    for (NodeId d = 0; d < S; ++d) {
      if (d == s) continue;
      const double dem = demand[static_cast<size_t>(s) * S + d];
      auto it = by_pair.find({s, d});
      const double routed = it == by_pair.end() ? 0.0 : it->second->demand_gbps;
      if (std::fabs(routed - dem) > tol)
        violate("C3_demand",
                node_name(topo, s) + "->" + node_name(topo, d) + " routed demand " +
                    fmt_double(routed) + " != aggregated " + fmt_double(dem),
                std::fabs(routed - dem));
    }

  // C4: flow conservation per commodity at every node, from the link flows
  // alone. Also collects per-link and per-relay totals for C7/C8/C11.
  const auto& links = topo.links();
  std::vector<double> link_total(links.size(), 0.0);
  std::vector<double> relay_fwd(topo.n_relays(), 0.0);
  std::vector<int> relay_requests(topo.n_relays(), 0);
  for (const CommodityFlow& c : routing.commodities) {
    std::map<NodeId, double> net;
    std::vector<double> relay_out_here(topo.n_relays(), 0.0);
    bool links_ok = true;
    for (const auto& [li, gbps] : c.link_flows) {
      if (li < 0 || static_cast<size_t>(li) >= links.size()) {
        violate("C4_flow", "commodity references unknown link index " + std::to_string(li),
                1.0);
        links_ok = false;
        continue;
      }
      if (gbps < -tol)
        violate("C4_flow", "negative flow on link " + std::to_string(li), -gbps);
      net[links[li].from] += gbps;
      net[links[li].to] -= gbps;
      link_total[li] += gbps;
      if (topo.is_relay(links[li].from))
        relay_out_here[links[li].from - topo.n_hosting()] += gbps;
    }
    if (!links_ok) continue;
    for (size_t node = 0; node < topo.nodes().size(); ++node) {
      const NodeId m = static_cast<NodeId>(node);
      double expect = 0.0;
      if (m == c.src) expect = c.demand_gbps;
      if (m == c.dst) expect = -c.demand_gbps;
      auto it = net.find(m);
      const double got = it == net.end() ? 0.0 : it->second;
      const double residual = std::fabs(got - expect);
      rep.max_flow_residual = std::max(rep.max_flow_residual, residual);
      if (residual > tol)
        violate("C4_flow",
                "commodity " + node_name(topo, c.src) + "->" + node_name(topo, c.dst) +
                    " imbalance at " + node_name(topo, m) + ": " + fmt_double(got) +
                    " vs expected " + fmt_double(expect),
                residual);
    }
    for (int r = 0; r < topo.n_relays(); ++r) {
      relay_fwd[r] += relay_out_here[r];
      if (relay_out_here[r] > tol) ++relay_requests[r];
    }
  }

  // C5/C6: server rate limits on aggregated demand.
  const double rate = topo.spec().server_rate_gbps;
  for (NodeId s = 0; s < S; ++s) {
    double egress = 0.0, ingress = 0.0;
    for (NodeId d = 0; d < S; ++d) {
      if (d == s) continue;
      egress += demand[static_cast<size_t>(s) * S + d];
      ingress += demand[static_cast<size_t>(d) * S + s];
    }
    if (egress > rate + tol)
      violate("C6_egress",
              node_name(topo, s) + " sends " + fmt_double(egress) + " Gbps > rate " +
                  fmt_double(rate),
              egress - rate);
    if (options.ingress_limit && ingress > rate + tol)
      violate("C6_ingress",
              node_name(topo, s) + " receives " + fmt_double(ingress) + " Gbps > rate " +
                  fmt_double(rate),
              ingress - rate);
  }

  // C7: relay uplink caps and activation linking.
  for (int r = 0; r < topo.n_relays(); ++r) {
    const NodeId rn = static_cast<NodeId>(topo.n_hosting() + r);
    if (relay_fwd[r] > topo.spec().onu_rate_gbps + tol)
      violate("C7_relay",
              node_name(topo, rn) + " forwards " + fmt_double(relay_fwd[r]) +
                  " Gbps > uplink " + fmt_double(topo.spec().onu_rate_gbps),
              relay_fwd[r] - topo.spec().onu_rate_gbps);
    if (relay_fwd[r] > tol && !placement.relay_active(rn))
      violate("C7_relay_activation",
              node_name(topo, rn) + " forwards traffic while inactive", relay_fwd[r]);
  }

  // C8: link capacities.
  for (size_t li = 0; li < links.size(); ++li)
    if (link_total[li] > links[li].capacity_gbps + tol)
      violate("C8_link",
              node_name(topo, links[li].from) + "->" + node_name(topo, links[li].to) +
                  " carries " + fmt_double(link_total[li]) + " Gbps > capacity " +
                  fmt_double(links[li].capacity_gbps),
              link_total[li] - links[li].capacity_gbps);

  // C11 (optional): distinct-commodity cap per relay.
  if (options.relay_request_cap) {
    const int max_requests = max_relay_requests(params);
    for (int r = 0; r < topo.n_relays(); ++r)
      if (relay_requests[r] > max_requests)
        violate("C11_request_cap",
                node_name(topo, static_cast<NodeId>(topo.n_hosting() + r)) + " forwards " +
                    std::to_string(relay_requests[r]) + " flows > cap " +
                    std::to_string(max_requests),
                relay_requests[r] - max_requests);
  }

  rep.feasible = rep.violations.empty();
  return rep;
}

}  // namespace ponplace
