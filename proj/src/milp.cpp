#include "ponplace/milp.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

namespace ponplace {

const char* to_string(ObjectiveMode m) {
  return m == ObjectiveMode::PP ? "pp" : "pp_np";
}

ObjectiveMode objective_mode_from_string(const std::string& s) {
  if (s == "pp") return ObjectiveMode::PP;
  if (s == "pp_np" || s == "pp-np" || s == "pp+np") return ObjectiveMode::PP_AND_NP;
  throw std::invalid_argument("unknown objective mode '" + s + "' (use pp or pp_np)");
}

std::size_t MilpInstance::count_family(VarFamily f) const {
  std::size_t n = 0;
  for (const Variable& v : vars_)
    if (v.family == f) ++n;
  return n;
}

int MilpInstance::pair_pos(int s, int d) const {
  // Dense position of the ordered pair (s, d), s != d.
  return s * (n_servers_ - 1) + d - (d > s ? 1 : 0);
}

int MilpInstance::assign_index(int v, int s) const {
  if (v < 0 || v >= n_vms_ || s < 0 || s >= n_servers_) return -1;
  return assign_base_ + v * n_servers_ + s;
}

int MilpInstance::server_on_index(int s) const {
  if (s < 0 || s >= n_servers_) return -1;
  return server_on_base_ + s;
}

int MilpInstance::relay_on_index(int r_pos) const {
  if (r_pos < 0 || r_pos >= n_relays_) return -1;
  return relay_on_base_ + r_pos;
}

int MilpInstance::pair_index(int v, int o, int s, int d) const {
  if (v < 0 || v >= n_vms_ || o < 0 || o >= n_vms_ || v == o) return -1;
  if (s < 0 || s >= n_servers_ || d < 0 || d >= n_servers_ || s == d) return -1;
  const int vo = v * (n_vms_ - 1) + o - (o > v ? 1 : 0);
  return pair_base_ + vo * n_servers_ * (n_servers_ - 1) + pair_pos(s, d);
}

int MilpInstance::pair_demand_index(int s, int d) const {
  if (s < 0 || s >= n_servers_ || d < 0 || d >= n_servers_ || s == d) return -1;
  return dem_base_ + pair_pos(s, d);
}

int MilpInstance::flow_index(int s, int d, int link) const {
  if (s < 0 || s >= n_servers_ || d < 0 || d >= n_servers_ || s == d) return -1;
  if (link < 0 || link >= n_links_) return -1;
  return flow_base_ + pair_pos(s, d) * n_links_ + link;
}

int MilpInstance::egress_index(int s) const {
  if (s < 0 || s >= n_servers_) return -1;
  return out_base_ + s;
}

int MilpInstance::relay_out_index(int r_pos) const {
  if (r_pos < 0 || r_pos >= n_relays_) return -1;
  return fwd_base_ + r_pos;
}

namespace {

std::string nm(const char* fmt, int a = -1, int b = -1, int c = -1, int d = -1) {
  char buf[96];
  std::snprintf(buf, sizeof(buf), fmt, a, b, c, d);
  return buf;
}

}  // namespace

MilpInstance build_instance(const Topology& topo, const WorkloadInstance& workload,
                            const PowerParams& params, ObjectiveMode mode,
                            const MilpOptions& options) {
  params.validate();
  const int S = topo.n_hosting();
  const int R = topo.n_relays();
  const int L = static_cast<int>(topo.links().size());
  const int n = workload.size();
  const int N = static_cast<int>(topo.nodes().size());

  MilpInstance m;
  m.mode_ = mode;
  m.options_ = options;
  m.topology_hash_ = topo.hash();
  m.workload_hash_ = workload.hash();
  m.n_vms_ = n;
  m.n_servers_ = S;
  m.n_relays_ = R;
  m.n_links_ = L;

  auto add_var = [&](std::string name, VarKind kind, double lb, double ub, VarFamily fam,
                     int i = -1, int j = -1, int k = -1, int l = -1) {
    Variable v;
    v.name = std::move(name);
    v.kind = kind;
    v.lb = lb;
    v.ub = ub;
    v.family = fam;
    v.i = i;
    v.j = j;
    v.k = k;
    v.l = l;
    m.vars_.push_back(std::move(v));
    return static_cast<int>(m.vars_.size()) - 1;
  };

  const double inf = std::numeric_limits<double>::infinity();

  m.assign_base_ = static_cast<int>(m.vars_.size());
  for (int v = 0; v < n; ++v)
    for (int s = 0; s < S; ++s)
      add_var(nm("assign_v%d_s%d", v, s), VarKind::Binary, 0, 1, VarFamily::Assign, v, s);

  m.server_on_base_ = static_cast<int>(m.vars_.size());
  for (int s = 0; s < S; ++s)
    add_var(nm("son_s%d", s), VarKind::Binary, 0, 1, VarFamily::ServerOn, s);

  m.relay_on_base_ = static_cast<int>(m.vars_.size());
  for (int r = 0; r < R; ++r)
    add_var(nm("ron_r%d", r), VarKind::Binary, 0, 1, VarFamily::RelayOn, r);

  // PairInd stays continuous; the three C2 rows pin it to the product of its
  // two Assign binaries at any integral point.
  m.pair_base_ = static_cast<int>(m.vars_.size());
  for (int v = 0; v < n; ++v)
    for (int o = 0; o < n; ++o) {
      if (o == v) continue;
      for (int s = 0; s < S; ++s)
        for (int d = 0; d < S; ++d) {
          if (d == s) continue;
          add_var(nm("pair_v%d_o%d_s%d_d%d", v, o, s, d), VarKind::Continuous, 0, 1,
                  VarFamily::PairInd, v, o, s, d);
        }
    }

  m.dem_base_ = static_cast<int>(m.vars_.size());
  for (int s = 0; s < S; ++s)
    for (int d = 0; d < S; ++d) {
      if (d == s) continue;
      add_var(nm("dem_s%d_d%d", s, d), VarKind::Continuous, 0, inf, VarFamily::PairDemand, s,
              d);
    }

  m.flow_base_ = static_cast<int>(m.vars_.size());
  for (int s = 0; s < S; ++s)
    for (int d = 0; d < S; ++d) {
      if (d == s) continue;
      for (int li = 0; li < L; ++li) {
        const Link& lk = topo.links()[li];
        add_var(nm("flow_s%d_d%d_m%d_n%d", s, d, lk.from, lk.to), VarKind::Continuous, 0, inf,
                VarFamily::Flow, s, d, li);
      }
    }

  m.out_base_ = static_cast<int>(m.vars_.size());
  for (int s = 0; s < S; ++s)
    add_var(nm("out_s%d", s), VarKind::Continuous, 0, inf, VarFamily::EgressTotal, s);

  m.fwd_base_ = static_cast<int>(m.vars_.size());
  for (int r = 0; r < R; ++r)
    add_var(nm("fwd_r%d", r), VarKind::Continuous, 0, inf, VarFamily::RelayOut, r);

  if (options.relay_request_cap) {
    m.fon_base_ = static_cast<int>(m.vars_.size());
    for (int s = 0; s < S; ++s)
      for (int d = 0; d < S; ++d) {
        if (d == s) continue;
        for (int r = 0; r < R; ++r)
          add_var(nm("fon_s%d_d%d_r%d", s, d, r), VarKind::Binary, 0, 1, VarFamily::FlowOn, s,
                  d, r);
      }
  }

  auto add_con = [&](std::string name, std::vector<LinTerm> terms, ConstraintSense sense,
                     double rhs) {
    Constraint c;
    c.name = std::move(name);
    c.terms = std::move(terms);
    c.sense = sense;
    c.rhs = rhs;
    m.cons_.push_back(std::move(c));
  };

  // C1: every VM placed exactly once.
  for (int v = 0; v < n; ++v) {
    std::vector<LinTerm> t;
    t.reserve(S);
    for (int s = 0; s < S; ++s) t.push_back({m.assign_index(v, s), 1.0});
    add_con(nm("assign_v%d", v), std::move(t), ConstraintSense::EQ, 1.0);
  }

  // C2: pair indicator equals the AND of its two assignments at integral points:
  //   pair >= a1 + a2 - 1, pair <= a1, pair <= a2.
  for (int v = 0; v < n; ++v)
    for (int o = 0; o < n; ++o) {
      if (o == v) continue;
      for (int s = 0; s < S; ++s)
        for (int d = 0; d < S; ++d) {
          if (d == s) continue;
          const int p = m.pair_index(v, o, s, d);
          const int a1 = m.assign_index(v, s);
          const int a2 = m.assign_index(o, d);
          add_con(nm("and_lb_v%d_o%d_s%d_d%d", v, o, s, d),
                  {{p, 1.0}, {a1, -1.0}, {a2, -1.0}}, ConstraintSense::GE, -1.0);
          add_con(nm("and_ub1_v%d_o%d_s%d_d%d", v, o, s, d), {{p, 1.0}, {a1, -1.0}},
                  ConstraintSense::LE, 0.0);
          add_con(nm("and_ub2_v%d_o%d_s%d_d%d", v, o, s, d), {{p, 1.0}, {a2, -1.0}},
                  ConstraintSense::LE, 0.0);
        }
    }

  // C3: aggregated demand between distinct servers.
  for (int s = 0; s < S; ++s)
    for (int d = 0; d < S; ++d) {
      if (d == s) continue;
      std::vector<LinTerm> t;
      t.push_back({m.pair_demand_index(s, d), 1.0});
      for (int v = 0; v < n; ++v)
        for (int o = 0; o < n; ++o) {
          if (o == v) continue;
          const double td = workload.traffic(v, o);
          if (td != 0.0) t.push_back({m.pair_index(v, o, s, d), -td});
        }
      add_con(nm("dem_def_s%d_d%d", s, d), std::move(t), ConstraintSense::EQ, 0.0);
    }

  // C4: flow conservation for every commodity at every node.
  for (int s = 0; s < S; ++s)
    for (int d = 0; d < S; ++d) {
      if (d == s) continue;
      for (int node = 0; node < N; ++node) {
        std::vector<LinTerm> t;
        for (NodeId nb : topo.neighbors(static_cast<NodeId>(node))) {
          t.push_back({m.flow_index(s, d, topo.link_index(node, nb)), 1.0});
          t.push_back({m.flow_index(s, d, topo.link_index(nb, node)), -1.0});
        }
        if (node == s)
          t.push_back({m.pair_demand_index(s, d), -1.0});
        else if (node == d)
          t.push_back({m.pair_demand_index(s, d), 1.0});
        add_con(nm("flow_bal_s%d_d%d_m%d", s, d, node), std::move(t), ConstraintSense::EQ,
                0.0);
      }
    }

  // C5: egress totals.
  for (int s = 0; s < S; ++s) {
    std::vector<LinTerm> t;
    t.push_back({m.egress_index(s), 1.0});
    for (int d = 0; d < S; ++d)
      if (d != s) t.push_back({m.pair_demand_index(s, d), -1.0});
    add_con(nm("out_def_s%d", s), std::move(t), ConstraintSense::EQ, 0.0);
  }

  // C6: server rate limits.
  const double rate = topo.spec().server_rate_gbps;
  for (int s = 0; s < S; ++s)
    add_con(nm("egress_s%d", s), {{m.egress_index(s), 1.0}}, ConstraintSense::LE, rate);
  if (options.ingress_limit) {
    for (int d = 0; d < S; ++d) {
      std::vector<LinTerm> t;
      for (int s = 0; s < S; ++s)
        if (s != d) t.push_back({m.pair_demand_index(s, d), 1.0});
      add_con(nm("ingress_d%d", d), std::move(t), ConstraintSense::LE, rate);
    }
  }

  // C7: relay forwarding totals and uplink caps.
  const double onu_rate = topo.spec().onu_rate_gbps;
  for (int r = 0; r < R; ++r) {
    const NodeId rn = topo.relay_of_cell(r);
    std::vector<LinTerm> t;
    t.push_back({m.relay_out_index(r), 1.0});
    for (int s = 0; s < S; ++s)
      for (int d = 0; d < S; ++d) {
        if (d == s) continue;
        for (NodeId nb : topo.neighbors(rn))
          t.push_back({m.flow_index(s, d, topo.link_index(rn, nb)), -1.0});
      }
    add_con(nm("fwd_def_r%d", r), std::move(t), ConstraintSense::EQ, 0.0);
    add_con(nm("onu_cap_r%d", r),
            {{m.relay_out_index(r), 1.0}, {m.relay_on_index(r), -onu_rate}},
            ConstraintSense::LE, 0.0);
  }

  // C8: link capacities.
  for (int li = 0; li < L; ++li) {
    const Link& lk = topo.links()[li];
    std::vector<LinTerm> t;
    for (int s = 0; s < S; ++s)
      for (int d = 0; d < S; ++d)
        if (d != s) t.push_back({m.flow_index(s, d, li), 1.0});
    add_con(nm("link_cap_m%d_n%d", lk.from, lk.to), std::move(t), ConstraintSense::LE,
            lk.capacity_gbps);
  }

  // C9: server resources. CPU is gated on activation; RAM is a plain cap.
  for (int s = 0; s < S; ++s) {
    std::vector<LinTerm> t;
    for (int v = 0; v < n; ++v)
      t.push_back({m.assign_index(v, s), workload.vms()[v].cpu_mips});
    t.push_back({m.server_on_index(s), -topo.nodes()[s].cpu_capacity_mips});
    add_con(nm("cpu_cap_s%d", s), std::move(t), ConstraintSense::LE, 0.0);

    std::vector<LinTerm> tr;
    for (int v = 0; v < n; ++v)
      tr.push_back({m.assign_index(v, s), workload.vms()[v].ram_gb});
    add_con(nm("ram_cap_s%d", s), std::move(tr), ConstraintSense::LE,
            topo.nodes()[s].ram_capacity_gb);
  }

  // C10: placing a VM activates its server.
  for (int v = 0; v < n; ++v)
    for (int s = 0; s < S; ++s)
      add_con(nm("act_v%d_s%d", v, s),
              {{m.assign_index(v, s), 1.0}, {m.server_on_index(s), -1.0}},
              ConstraintSense::LE, 0.0);

  // C11 (optional): cap on distinct commodities a relay may forward.
  if (options.relay_request_cap) {
    const double max_requests = max_relay_requests(params);
    for (int r = 0; r < R; ++r) {
      const NodeId rn = topo.relay_of_cell(r);
      std::vector<LinTerm> cnt;
      for (int s = 0; s < S; ++s)
        for (int d = 0; d < S; ++d) {
          if (d == s) continue;
          const int fon = m.fon_base_ + (s * (S - 1) + d - (d > s ? 1 : 0)) * R + r;
          std::vector<LinTerm> t;
          for (NodeId nb : topo.neighbors(rn))
            t.push_back({m.flow_index(s, d, topo.link_index(rn, nb)), 1.0});
          t.push_back({fon, -onu_rate});
          add_con(nm("fon_def_s%d_d%d_r%d", s, d, r), std::move(t), ConstraintSense::LE, 0.0);
          cnt.push_back({fon, 1.0});
        }
      add_con(nm("fwd_cnt_r%d", r), std::move(cnt), ConstraintSense::LE, max_requests);
    }
  }

  // Objective.
  for (int s = 0; s < S; ++s)
    m.objective_.push_back(
        {m.server_on_index(s), params.p_idle_w + params.p_transceiver_w});
  for (int v = 0; v < n; ++v)
    for (int s = 0; s < S; ++s) {
      const double slope =
          (params.p_max_w - params.p_idle_w) / topo.nodes()[s].cpu_capacity_mips;
      m.objective_.push_back({m.assign_index(v, s), slope * workload.vms()[v].cpu_mips});
    }
  if (mode == ObjectiveMode::PP_AND_NP) {
    for (int r = 0; r < R; ++r)
      m.objective_.push_back({m.relay_on_index(r), params.p_idle_w + params.p_onu_w});
    for (int r = 0; r < R; ++r)
      m.objective_.push_back(
          {m.relay_out_index(r), (params.p_max_w - params.p_idle_w) / onu_rate});
  }
  return m;
}

std::vector<double> solution_vector(const MilpInstance& instance, const Topology& topo,
                                    const WorkloadInstance& workload,
                                    const Placement& placement, const Routing& routing) {
  if (workload.size() != instance.n_vms())
    throw std::invalid_argument("workload does not match instance");
  if (static_cast<int>(placement.assignment.size()) != instance.n_vms())
    throw std::invalid_argument("placement does not match instance");

  std::vector<double> x(instance.vars().size(), 0.0);
  const int n = instance.n_vms();
  const int S = instance.n_servers();

  for (int v = 0; v < n; ++v) x[instance.assign_index(v, placement.assignment[v])] = 1.0;
  for (int s = 0; s < S; ++s)
    x[instance.server_on_index(s)] = placement.server_active(s) ? 1.0 : 0.0;
  for (int r = 0; r < instance.n_relays(); ++r)
    x[instance.relay_on_index(r)] =
        placement.relay_active(static_cast<NodeId>(S + r)) ? 1.0 : 0.0;

  for (int v = 0; v < n; ++v)
    for (int o = 0; o < n; ++o) {
      if (o == v) continue;
      const int s = placement.assignment[v];
      const int d = placement.assignment[o];
      if (s != d) x[instance.pair_index(v, o, s, d)] = 1.0;
    }

  const auto demand = server_demand_matrix(topo, workload, placement);
  for (int s = 0; s < S; ++s) {
    double total = 0;
    for (int d = 0; d < S; ++d) {
      if (d == s) continue;
      const double dem = demand[static_cast<size_t>(s) * S + d];
      x[instance.pair_demand_index(s, d)] = dem;
      total += dem;
    }
    x[instance.egress_index(s)] = total;
  }

  for (const CommodityFlow& c : routing.commodities)
    for (const auto& [li, gbps] : c.link_flows)
      x[instance.flow_index(c.src, c.dst, li)] += gbps;

  const auto fwd = relay_forwarded(topo, routing);
  for (int r = 0; r < instance.n_relays(); ++r) x[instance.relay_out_index(r)] = fwd[r];
  return x;
}

double objective_value_at(const MilpInstance& instance, const std::vector<double>& values) {
  if (values.size() != instance.vars().size())
    throw std::invalid_argument("value vector does not match instance");
  double obj = 0;
  for (const LinTerm& t : instance.objective()) obj += t.coef * values[t.var];
  return obj;
}

}  // namespace ponplace
