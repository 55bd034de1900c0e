#include "ponplace/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

#include "ponplace/errors.hpp"
#include "ponplace/feasibility.hpp"
#include "ponplace/text_io.hpp"

namespace ponplace {

namespace {

constexpr double kTol = kFeasibilityTol;
constexpr double kInf = std::numeric_limits<double>::infinity();

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

void fill_from_eval(SolveReport& rep, AssignmentEval&& ev) {
  rep.placement = std::move(ev.placement);
  rep.routing = std::move(ev.routing);
  rep.power = std::move(ev.power);
  rep.objective_w = ev.objective_w;
}

// Acceptance rule shared by both exact solvers: strictly better, or tied
// within tolerance and lexicographically smaller.
bool improves(bool has_inc, const AssignmentEval& inc, const AssignmentEval& cand) {
  if (!has_inc) return true;
  if (cand.objective_w < inc.objective_w - kObjectiveTol) return true;
  return std::fabs(cand.objective_w - inc.objective_w) <= kObjectiveTol &&
         cand.placement.assignment < inc.placement.assignment;
}

}  // namespace

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Feasible: return "feasible";
    case SolveStatus::Infeasible: return "infeasible";
  }
  return "?";
}

void SolverLimits::validate() const {
  if (std::isnan(time_limit_s) || time_limit_s <= 0)
    throw std::invalid_argument("time_limit_s must be positive");
}

AssignmentEval evaluate_assignment(const Topology& topo, const WorkloadInstance& workload,
                                   const std::vector<NodeId>& assignment, ObjectiveMode mode,
                                   const MilpOptions& options, const PowerParams& params) {
  const int n = workload.size();
  const int S = topo.n_hosting();
  if (static_cast<int>(assignment.size()) != n)
    throw std::invalid_argument("assignment size does not match workload");
  for (NodeId s : assignment)
    if (!topo.is_hosting(s)) throw std::invalid_argument("assignment target is not a server");

  AssignmentEval ev;
  ev.placement.assignment = assignment;
  ev.placement.active_servers = assignment;
  std::sort(ev.placement.active_servers.begin(), ev.placement.active_servers.end());
  ev.placement.active_servers.erase(
      std::unique(ev.placement.active_servers.begin(), ev.placement.active_servers.end()),
      ev.placement.active_servers.end());

  std::vector<double> cpu_used(S, 0.0), ram_used(S, 0.0);
  for (int v = 0; v < n; ++v) {
    cpu_used[assignment[v]] += workload.vms()[v].cpu_mips;
    ram_used[assignment[v]] += workload.vms()[v].ram_gb;
  }
  for (NodeId s : ev.placement.active_servers) {
    if (cpu_used[s] > topo.nodes()[s].cpu_capacity_mips + kTol) {
      ev.reason = "cpu capacity exceeded on " + topo.nodes()[s].name;
      return ev;
    }
    if (ram_used[s] > topo.nodes()[s].ram_capacity_gb + kTol) {
      ev.reason = "ram capacity exceeded on " + topo.nodes()[s].name;
      return ev;
    }
  }

  const std::vector<double> demand = server_demand_matrix(topo, workload, ev.placement);
  const double rate = topo.spec().server_rate_gbps;
  for (NodeId s = 0; s < S; ++s) {
    double egress = 0.0, ingress = 0.0;
    for (NodeId d = 0; d < S; ++d) {
      egress += demand[static_cast<size_t>(s) * S + d];
      ingress += demand[static_cast<size_t>(d) * S + s];
    }
    if (egress > rate + kTol) {
      ev.reason = "egress rate exceeded on " + topo.nodes()[s].name;
      return ev;
    }
    if (options.ingress_limit && ingress > rate + kTol) {
      ev.reason = "ingress rate exceeded on " + topo.nodes()[s].name;
      return ev;
    }
  }

  ev.routing = route_shortest(topo, workload, ev.placement);

  const std::vector<double> fwd = relay_forwarded(topo, ev.routing);
  for (int r = 0; r < topo.n_relays(); ++r)
    if (fwd[r] > topo.spec().onu_rate_gbps + kTol) {
      ev.reason = "uplink rate exceeded on " + topo.nodes()[S + r].name;
      return ev;
    }

  std::vector<double> link_total(topo.links().size(), 0.0);
  for (const CommodityFlow& c : ev.routing.commodities)
    for (const auto& [li, gbps] : c.link_flows) link_total[li] += gbps;
  for (size_t li = 0; li < link_total.size(); ++li)
    if (link_total[li] > topo.links()[li].capacity_gbps + kTol) {
      ev.reason = "link capacity exceeded on link " + std::to_string(li);
      return ev;
    }

  if (options.relay_request_cap) {
    const int cap = max_relay_requests(params);
    std::vector<int> requests(topo.n_relays(), 0);
    for (const CommodityFlow& c : ev.routing.commodities)
      for (NodeId rn : topo.route(c.src, c.dst).relays) ++requests[rn - S];
    for (int r = 0; r < topo.n_relays(); ++r)
      if (requests[r] > cap) {
        ev.reason = "request cap exceeded on " + topo.nodes()[S + r].name;
        return ev;
      }
  }

  refresh_activation(topo, ev.placement, ev.routing);
  try {
    ev.power = evaluate_power(topo, params, workload, ev.placement, ev.routing);
  } catch (const infeasible_error& e) {
    // Loads inside the checker tolerance band but above the strict power-model
    // contract land here; treat them as infeasible rather than crash.
    ev.reason = e.what();
    return ev;
  }
  ev.objective_w = mode == ObjectiveMode::PP ? ev.power.pp_w : ev.power.total_w;
  ev.feasible = true;
  return ev;
}

std::string presolve_certificate(const Topology& topo, const WorkloadInstance& workload,
                                 const MilpOptions& options) {
  const int n = workload.size();
  if (n == 0) return "";
  const int S = topo.n_hosting();

  double max_cap = 0.0, max_ram = 0.0, total_cap = 0.0, total_ram = 0.0;
  for (NodeId s = 0; s < S; ++s) {
    max_cap = std::max(max_cap, topo.nodes()[s].cpu_capacity_mips);
    max_ram = std::max(max_ram, topo.nodes()[s].ram_capacity_gb);
    total_cap += topo.nodes()[s].cpu_capacity_mips;
    total_ram += topo.nodes()[s].ram_capacity_gb;
  }

  for (int v = 0; v < n; ++v) {
    if (workload.vms()[v].cpu_mips > max_cap + kTol)
      return "vm " + std::to_string(v) + " needs " + fmt_double(workload.vms()[v].cpu_mips) +
             " MIPS but the largest server offers " + fmt_double(max_cap);
    if (workload.vms()[v].ram_gb > max_ram + kTol)
      return "vm " + std::to_string(v) + " needs " + fmt_double(workload.vms()[v].ram_gb) +
             " GB but the largest server offers " + fmt_double(max_ram);
  }
  if (workload.total_cpu() > total_cap + kTol)
    return "total cpu demand " + fmt_double(workload.total_cpu()) +
           " MIPS exceeds total capacity " + fmt_double(total_cap);
  if (workload.total_ram() > total_ram + kTol)
    return "total ram demand " + fmt_double(workload.total_ram()) +
           " GB exceeds total capacity " + fmt_double(total_ram);

  // A VM whose off-server traffic stays above the server rate under the most
  // absorbing co-location possible (fractional relaxation, so the bound on
  // absorbable traffic is valid) proves infeasibility on its own.
  const double rate = topo.spec().server_rate_gbps;
  const int directions = options.ingress_limit ? 2 : 1;
  for (int v = 0; v < n; ++v) {
    for (int dir = 0; dir < directions; ++dir) {
      const double total = dir == 0 ? workload.vm_egress(v) : workload.vm_ingress(v);
      if (total <= rate + kTol) continue;
      struct Peer {
        double traffic, cpu;
        int id;
      };
      std::vector<Peer> peers;
      for (int o = 0; o < n; ++o) {
        if (o == v) continue;
        const double t = dir == 0 ? workload.traffic(v, o) : workload.traffic(o, v);
        if (t > 0) peers.push_back({t, workload.vms()[o].cpu_mips, o});
      }
      std::sort(peers.begin(), peers.end(), [](const Peer& a, const Peer& b) {
        const double da = a.cpu > 0 ? a.traffic / a.cpu : kInf;
        const double db = b.cpu > 0 ? b.traffic / b.cpu : kInf;
        if (da != db) return da > db;
        return a.id < b.id;
      });
      double spare = max_cap - workload.vms()[v].cpu_mips;
      double absorbable = 0.0;
      for (const Peer& p : peers) {
        if (spare <= 0) break;
        if (p.cpu <= 0) {
          absorbable += p.traffic;
          continue;
        }
        const double take = std::min(1.0, spare / p.cpu);
        absorbable += take * p.traffic;
        spare -= take * p.cpu;
      }
      if (total - absorbable > rate + kTol)
        return "vm " + std::to_string(v) + " must " + (dir == 0 ? "send" : "receive") + " " +
               fmt_double(total - absorbable) + " Gbps off-server under any placement; the server rate is " +
               fmt_double(rate);
    }
  }
  return "";
}

SolveReport brute_force(const Topology& topo, const WorkloadInstance& workload,
                        ObjectiveMode mode, const MilpOptions& options,
                        const PowerParams& params) {
  params.validate();
  const int n = workload.size();
  const int S = topo.n_hosting();
  double count = 1;
  for (int v = 0; v < n; ++v) {
    count *= S;
    if (count > 1e7)
      throw std::invalid_argument("brute_force refuses instances beyond 1e7 assignments");
  }

  const auto t0 = Clock::now();
  SolveReport rep;
  bool has_inc = false;
  AssignmentEval inc;
  std::vector<NodeId> a(n, 0);
  while (true) {
    ++rep.nodes_explored;
    AssignmentEval ev = evaluate_assignment(topo, workload, a, mode, options, params);
    if (ev.feasible && improves(has_inc, inc, ev)) {
      inc = std::move(ev);
      has_inc = true;
    }
    int i = n - 1;
    while (i >= 0 && a[i] == S - 1) a[i--] = 0;
    if (i < 0) break;
    ++a[i];
  }
  if (has_inc) {
    rep.status = SolveStatus::Optimal;
    rep.lower_bound_w = inc.objective_w;
    fill_from_eval(rep, std::move(inc));
  } else {
    rep.note = "no feasible assignment exists";
  }
  rep.wall_time_s = seconds_since(t0);
  return rep;
}

namespace {

// Depth-first search over assignments in descending-cpu VM order. All caps are
// maintained incrementally with journaled undo (exact value restore, so
// repeated visits never accumulate floating-point drift).
struct BranchSearch {
  const Topology& topo;
  const WorkloadInstance& wl;
  ObjectiveMode mode;
  MilpOptions opt;
  PowerParams par;
  SolverLimits lim;

  int n, S;
  double rate, onu_rate;
  int req_cap;
  double server_fixed, relay_fixed, onu_slope, cap_max = 0;

  std::vector<int> order;
  std::vector<double> vm_cpu, vm_ram;
  std::vector<double> sfx_cpu, sfx_ram;
  std::vector<double> cap, ramcap, slope, link_cap;
  std::vector<double> cap_prefix, ram_prefix;  // sums of the k largest
  std::vector<NodeId> slope_order;             // slope-ascending, static
  std::vector<NodeId> inactive_order;          // capacity-descending try order
  std::vector<std::vector<NodeId>> cand;       // per-depth scratch

  std::vector<NodeId> assign;
  std::vector<int> host_count, relay_req;
  std::vector<double> cpu_used, ram_used, eg, ing, link_flow, pair_dem, relay_fwd;
  double committed_pp = 0, total_fwd = 0, free_cap = 0, free_ram = 0;
  int active_relay_count = 0;

  std::vector<std::pair<double*, double>> dj;
  std::vector<std::pair<int*, int>> ij;

  bool has_inc = false;
  AssignmentEval inc;
  double target = 0;  // lex-dive acceptance threshold
  std::int64_t nodes = 0;
  bool stopped = false;
  std::string stop_note;
  Clock::time_point t0 = Clock::now();

  // lex_order = false: optimization pass, VMs in descending-cpu order.
  // lex_order = true: tie-polish pass, VMs in id order so a leftmost dive
  // yields the lexicographically smallest assignment.
  BranchSearch(const Topology& t, const WorkloadInstance& w, ObjectiveMode m,
               const MilpOptions& o, const PowerParams& p, const SolverLimits& l,
               bool lex_order = false)
      : topo(t), wl(w), mode(m), opt(o), par(p), lim(l) {
    n = wl.size();
    S = topo.n_hosting();
    rate = topo.spec().server_rate_gbps;
    onu_rate = topo.spec().onu_rate_gbps;
    req_cap = max_relay_requests(par);
    server_fixed = par.p_idle_w + par.p_transceiver_w;
    relay_fixed = par.p_idle_w + par.p_onu_w;
    onu_slope = (par.p_max_w - par.p_idle_w) / onu_rate;

    vm_cpu.resize(n);
    vm_ram.resize(n);
    for (int v = 0; v < n; ++v) {
      vm_cpu[v] = wl.vms()[v].cpu_mips;
      vm_ram[v] = wl.vms()[v].ram_gb;
    }
    order.resize(n);
    for (int v = 0; v < n; ++v) order[v] = v;
    if (!lex_order)
      std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (vm_cpu[a] != vm_cpu[b]) return vm_cpu[a] > vm_cpu[b];
        return a < b;
      });
    sfx_cpu.assign(n + 1, 0.0);
    sfx_ram.assign(n + 1, 0.0);
    for (int d = n - 1; d >= 0; --d) {
      sfx_cpu[d] = sfx_cpu[d + 1] + vm_cpu[order[d]];
      sfx_ram[d] = sfx_ram[d + 1] + vm_ram[order[d]];
    }

    cap.resize(S);
    ramcap.resize(S);
    slope.resize(S);
    for (NodeId s = 0; s < S; ++s) {
      cap[s] = topo.nodes()[s].cpu_capacity_mips;
      ramcap[s] = topo.nodes()[s].ram_capacity_gb;
      slope[s] = (par.p_max_w - par.p_idle_w) / cap[s];
    }
    slope_order.resize(S);
    for (NodeId s = 0; s < S; ++s) slope_order[s] = s;
    std::sort(slope_order.begin(), slope_order.end(), [&](NodeId a, NodeId b) {
      if (slope[a] != slope[b]) return slope[a] < slope[b];
      return a < b;
    });
    cap_max = *std::max_element(cap.begin(), cap.end());
    auto prefix_desc = [](std::vector<double> vals) {
      std::sort(vals.begin(), vals.end(), std::greater<>());
      std::vector<double> pre(vals.size() + 1, 0.0);
      for (size_t k = 0; k < vals.size(); ++k) pre[k + 1] = pre[k] + vals[k];
      return pre;
    };
    cap_prefix = prefix_desc(cap);
    ram_prefix = prefix_desc(ramcap);
    inactive_order.resize(S);
    for (NodeId s = 0; s < S; ++s) inactive_order[s] = s;
    std::sort(inactive_order.begin(), inactive_order.end(), [&](NodeId a, NodeId b) {
      if (cap[a] != cap[b]) return cap[a] > cap[b];
      return a < b;
    });
    link_cap.resize(topo.links().size());
    for (size_t li = 0; li < link_cap.size(); ++li)
      link_cap[li] = topo.links()[li].capacity_gbps;

    assign.assign(n, -1);
    host_count.assign(S, 0);
    relay_req.assign(topo.n_relays(), 0);
    cpu_used.assign(S, 0.0);
    ram_used.assign(S, 0.0);
    eg.assign(S, 0.0);
    ing.assign(S, 0.0);
    link_flow.assign(topo.links().size(), 0.0);
    pair_dem.assign(static_cast<size_t>(S) * S, 0.0);
    relay_fwd.assign(topo.n_relays(), 0.0);
    cand.assign(std::max(n, 1), {});
    for (auto& c : cand) c.reserve(S);
    dj.reserve(1 << 14);
    ij.reserve(1 << 12);
  }

  void setd(double& slot, double v) {
    dj.emplace_back(&slot, slot);
    slot = v;
  }
  void seti(int& slot, int v) {
    ij.emplace_back(&slot, slot);
    slot = v;
  }
  void undo(size_t dm, size_t im) {
    while (dj.size() > dm) {
      *dj.back().first = dj.back().second;
      dj.pop_back();
    }
    while (ij.size() > im) {
      *ij.back().first = ij.back().second;
      ij.pop_back();
    }
  }

  bool limit_hit() {
    if (lim.node_limit >= 0 && nodes >= lim.node_limit) {
      stop_note = "node limit reached";
      return true;
    }
    if ((nodes & 255) == 0 && std::isfinite(lim.time_limit_s) &&
        seconds_since(t0) > lim.time_limit_s) {
      stop_note = "time limit reached";
      return true;
    }
    return false;
  }

  bool add_flow(NodeId a, NodeId b, double t) {
    if (t <= 0) return true;
    setd(eg[a], eg[a] + t);
    if (eg[a] > rate + kTol) return false;
    setd(ing[b], ing[b] + t);
    if (opt.ingress_limit && ing[b] > rate + kTol) return false;
    double& pd = pair_dem[static_cast<size_t>(a) * S + b];
    const bool new_pair = pd <= 0;
    setd(pd, pd + t);
    const Route& rt = topo.route(a, b);
    for (int li : rt.links) {
      setd(link_flow[li], link_flow[li] + t);
      if (link_flow[li] > link_cap[li] + kTol) return false;
    }
    for (NodeId rn : rt.relays) {
      const int r = rn - S;
      if (relay_fwd[r] <= 0) seti(active_relay_count, active_relay_count + 1);
      setd(relay_fwd[r], relay_fwd[r] + t);
      if (relay_fwd[r] > onu_rate + kTol) return false;
      setd(total_fwd, total_fwd + t);
      if (opt.relay_request_cap && new_pair) {
        seti(relay_req[r], relay_req[r] + 1);
        if (relay_req[r] > req_cap) return false;
      }
    }
    return true;
  }

  bool place(int v, NodeId s) {
    if (cpu_used[s] + vm_cpu[v] > cap[s] + kTol) return false;
    if (ram_used[s] + vm_ram[v] > ramcap[s] + kTol) return false;
    if (host_count[s] == 0) {
      setd(committed_pp, committed_pp + server_fixed);
      setd(free_cap, free_cap + cap[s]);
      setd(free_ram, free_ram + ramcap[s]);
    }
    seti(host_count[s], host_count[s] + 1);
    setd(cpu_used[s], cpu_used[s] + vm_cpu[v]);
    setd(ram_used[s], ram_used[s] + vm_ram[v]);
    setd(free_cap, free_cap - vm_cpu[v]);
    setd(free_ram, free_ram - vm_ram[v]);
    setd(committed_pp, committed_pp + vm_cpu[v] * slope[s]);
    for (int o = 0; o < n; ++o) {
      if (o == v || assign[o] < 0) continue;
      const NodeId d = assign[o];
      if (d == s) continue;
      if (!add_flow(s, d, wl.traffic(v, o))) return false;
      if (!add_flow(d, s, wl.traffic(o, v))) return false;
    }
    return true;
  }

  // Smallest k whose k largest entries cover `need`; -1 when even all of them
  // cannot.
  static int cover_count(const std::vector<double>& prefix, double need) {
    if (need <= kTol) return 0;
    for (size_t k = 1; k < prefix.size(); ++k)
      if (prefix[k] >= need - kTol) return static_cast<int>(k);
    return -1;
  }

  // Admissible: committed power is exact for the current partial placement,
  // the proportional term of the remaining load is bounded by a fractional
  // fill of per-server spare capacity in slope order, and the count of forced
  // extra activations is bounded two ways: covering the remaining demand with
  // the globally largest servers, and counting remaining VMs that fit no
  // active spare while any two of them overflow even the largest server.
  // Relay terms only ever grow as VMs are added.
  double bound(int depth) const {
    const int k_cpu = cover_count(cap_prefix, sfx_cpu[depth] - free_cap);
    const int k_ram = cover_count(ram_prefix, sfx_ram[depth] - free_ram);
    if (k_cpu < 0 || k_ram < 0) return kInf;
    double prop = 0, left = sfx_cpu[depth];
    for (NodeId s : slope_order) {
      if (left <= kTol) break;
      const double spare = cap[s] - cpu_used[s];
      if (spare <= 0) continue;
      const double take = std::min(left, spare);
      prop += take * slope[s];
      left -= take;
    }
    if (left > kTol) return kInf;
    double max_active_spare = 0;
    for (NodeId s = 0; s < S; ++s)
      if (host_count[s] > 0)
        max_active_spare = std::max(max_active_spare, cap[s] - cpu_used[s]);
    int solo = 0;
    for (int d = depth; d < n; ++d) {
      const double c = vm_cpu[order[d]];
      if (2 * c > cap_max + kTol && c > max_active_spare + kTol) ++solo;
    }
    const int k = std::max(solo, std::max(k_cpu, k_ram));
    double b = committed_pp + server_fixed * k + prop;
    if (mode == ObjectiveMode::PP_AND_NP)
      b += relay_fixed * active_relay_count + onu_slope * total_fwd;
    return b;
  }

  void leaf() {
    AssignmentEval ev = evaluate_assignment(topo, wl, assign, mode, opt, par);
    if (!ev.feasible) return;
    if (!has_inc || ev.objective_w < inc.objective_w - kObjectiveTol) {
      inc = std::move(ev);
      has_inc = true;
    }
  }

  // Optimization pass. Only strict improvements are pursued; objective ties
  // are left to the lex dive below, otherwise near-symmetric instances (equal
  // capacities) force the search through every relabeling of an optimum.
  void dfs(int depth) {
    if (depth == n) {
      leaf();
      return;
    }
    const int v = order[depth];
    // Servers already hosting something first (cheap activation reuse and the
    // best shot at co-location), then fresh servers by descending capacity.
    auto& c = cand[depth];
    c.clear();
    for (NodeId s = 0; s < S; ++s)
      if (host_count[s] > 0) c.push_back(s);
    for (NodeId s : inactive_order)
      if (host_count[s] == 0) c.push_back(s);
    for (NodeId s : c) {
      if (limit_hit()) {
        stopped = true;
        return;
      }
      ++nodes;
      const size_t dm = dj.size(), im = ij.size();
      if (place(v, s)) {
        assign[v] = s;
        const double b = bound(depth + 1);
        if (std::isfinite(b) && (!has_inc || b < inc.objective_w - kObjectiveTol))
          dfs(depth + 1);
        assign[v] = -1;
      }
      undo(dm, im);
      if (stopped) return;
    }
  }

  // Tie polish: leftmost depth-first dive in VM-id order accepting any leaf
  // whose objective does not exceed `target`. The first accepted leaf is the
  // lexicographically smallest such assignment. Requires lex_order = true.
  bool dive(int depth) {
    if (depth == n) {
      AssignmentEval ev = evaluate_assignment(topo, wl, assign, mode, opt, par);
      if (ev.feasible && ev.objective_w <= target) {
        inc = std::move(ev);
        has_inc = true;
        return true;
      }
      return false;
    }
    const int v = order[depth];
    for (NodeId s = 0; s < S; ++s) {
      if (limit_hit()) {
        stopped = true;
        return false;
      }
      ++nodes;
      const size_t dm = dj.size(), im = ij.size();
      bool found = false;
      if (place(v, s)) {
        assign[v] = s;
        const double b = bound(depth + 1);
        if (std::isfinite(b) && b <= target + kObjectiveTol) found = dive(depth + 1);
        assign[v] = -1;
      }
      undo(dm, im);
      if (found) return true;
      if (stopped) return false;
    }
    return false;
  }
};

}  // namespace

SolveReport solve_exact(const Topology& topo, const WorkloadInstance& workload,
                        ObjectiveMode mode, const MilpOptions& options,
                        const PowerParams& params, const SolverLimits& limits) {
  params.validate();
  limits.validate();
  const auto t0 = Clock::now();
  SolveReport rep;

  const std::string cert = presolve_certificate(topo, workload, options);
  if (!cert.empty()) {
    rep.note = "infeasibility certificate: " + cert;
    rep.wall_time_s = seconds_since(t0);
    return rep;
  }

  BranchSearch bs(topo, workload, mode, options, params, limits);
  bs.t0 = t0;

  SolveReport seed = solve_heuristic(topo, workload, mode, options, params);
  if (seed.status != SolveStatus::Infeasible) {
    bs.has_inc = true;
    bs.inc.feasible = true;
    bs.inc.placement = std::move(*seed.placement);
    bs.inc.routing = std::move(seed.routing);
    bs.inc.power = std::move(seed.power);
    bs.inc.objective_w = seed.objective_w;
  }
  const double root_bound = bs.bound(0);

  bs.dfs(0);

  rep.nodes_explored = bs.nodes;
  if (!bs.stopped) {
    if (bs.has_inc) {
      // The optimization pass proves optimality within the tie tolerance;
      // the dive replaces the incumbent with the lexicographically smallest
      // assignment of equal (or better, within tolerance) objective.
      BranchSearch polish(topo, workload, mode, options, params, limits, true);
      polish.t0 = t0;
      polish.nodes = bs.nodes;
      polish.target = bs.inc.objective_w;
      const bool polished = polish.dive(0);
      rep.nodes_explored = polish.nodes;
      rep.status = SolveStatus::Optimal;
      AssignmentEval final_eval = polished ? std::move(polish.inc) : std::move(bs.inc);
      rep.lower_bound_w = final_eval.objective_w;
      fill_from_eval(rep, std::move(final_eval));
      if (polish.stopped)
        rep.note = "optimal; lexicographic tie polish truncated by " + polish.stop_note;
    } else {
      rep.note = "search exhausted; no feasible assignment exists";
    }
  } else {
    if (bs.has_inc) {
      rep.status = SolveStatus::Feasible;
      rep.lower_bound_w = std::isfinite(root_bound) ? std::min(root_bound, bs.inc.objective_w)
                                                    : bs.inc.objective_w;
      const double obj = bs.inc.objective_w;
      fill_from_eval(rep, std::move(bs.inc));
      rep.objective_w = obj;
      rep.note = bs.stop_note + "; incumbent may be suboptimal";
    } else {
      rep.lower_bound_w = std::isfinite(root_bound) ? root_bound : 0.0;
      rep.note = bs.stop_note + "; feasibility undecided";
    }
  }
  rep.wall_time_s = seconds_since(t0);
  return rep;
}

namespace {

// Violation mass of an assignment: the sum of all constraint overshoots, cpu
// in MIPS and traffic in Gbps. Zero means feasible; the repair loop descends
// on (mass, objective).
std::pair<double, double> assess_assignment(const Topology& topo, const WorkloadInstance& wl,
                                            const std::vector<NodeId>& assignment,
                                            ObjectiveMode mode, const MilpOptions& options,
                                            const PowerParams& params) {
  const int n = wl.size();
  const int S = topo.n_hosting();
  double mass = 0.0;

  Placement pl;
  pl.assignment = assignment;
  pl.active_servers = assignment;
  std::sort(pl.active_servers.begin(), pl.active_servers.end());
  pl.active_servers.erase(std::unique(pl.active_servers.begin(), pl.active_servers.end()),
                          pl.active_servers.end());

  std::vector<double> cpu_used(S, 0.0), ram_used(S, 0.0);
  for (int v = 0; v < n; ++v) {
    cpu_used[assignment[v]] += wl.vms()[v].cpu_mips;
    ram_used[assignment[v]] += wl.vms()[v].ram_gb;
  }
  for (NodeId s = 0; s < S; ++s) {
    mass += std::max(0.0, cpu_used[s] - topo.nodes()[s].cpu_capacity_mips);
    mass += std::max(0.0, ram_used[s] - topo.nodes()[s].ram_capacity_gb);
  }

  const std::vector<double> demand = server_demand_matrix(topo, wl, pl);
  const double rate = topo.spec().server_rate_gbps;
  for (NodeId s = 0; s < S; ++s) {
    double egress = 0.0, ingress = 0.0;
    for (NodeId d = 0; d < S; ++d) {
      egress += demand[static_cast<size_t>(s) * S + d];
      ingress += demand[static_cast<size_t>(d) * S + s];
    }
    mass += std::max(0.0, egress - rate);
    if (options.ingress_limit) mass += std::max(0.0, ingress - rate);
  }

  const Routing routing = route_shortest(topo, wl, pl);
  const std::vector<double> fwd = relay_forwarded(topo, routing);
  for (int r = 0; r < topo.n_relays(); ++r)
    mass += std::max(0.0, fwd[r] - topo.spec().onu_rate_gbps);

  std::vector<double> link_total(topo.links().size(), 0.0);
  std::vector<int> requests(topo.n_relays(), 0);
  for (const CommodityFlow& c : routing.commodities) {
    for (const auto& [li, gbps] : c.link_flows) link_total[li] += gbps;
    if (options.relay_request_cap)
      for (NodeId rn : topo.route(c.src, c.dst).relays) ++requests[rn - S];
  }
  for (size_t li = 0; li < link_total.size(); ++li)
    mass += std::max(0.0, link_total[li] - topo.links()[li].capacity_gbps);
  if (options.relay_request_cap) {
    const int cap = max_relay_requests(params);
    for (int r = 0; r < topo.n_relays(); ++r)
      mass += std::max(0, requests[r] - cap);
  }

  if (mass > 0) return {mass, kInf};

  refresh_activation(topo, pl, routing);
  const PowerBreakdown power = evaluate_power(topo, params, wl, pl, routing);
  return {0.0, mode == ObjectiveMode::PP ? power.pp_w : power.total_w};
}

}  // namespace

SolveReport solve_heuristic(const Topology& topo, const WorkloadInstance& workload,
                            ObjectiveMode mode, const MilpOptions& options,
                            const PowerParams& params) {
  params.validate();
  const auto t0 = Clock::now();
  SolveReport rep;

  const std::string cert = presolve_certificate(topo, workload, options);
  if (!cert.empty()) {
    rep.note = "infeasibility certificate: " + cert;
    rep.wall_time_s = seconds_since(t0);
    return rep;
  }

  const int n = workload.size();
  const int S = topo.n_hosting();
  if (n == 0) {
    AssignmentEval ev = evaluate_assignment(topo, workload, {}, mode, options, params);
    rep.status = SolveStatus::Optimal;
    rep.lower_bound_w = ev.objective_w;
    fill_from_eval(rep, std::move(ev));
    rep.wall_time_s = seconds_since(t0);
    return rep;
  }

  double max_cap = 0.0, max_ram = 0.0;
  for (NodeId s = 0; s < S; ++s) {
    max_cap = std::max(max_cap, topo.nodes()[s].cpu_capacity_mips);
    max_ram = std::max(max_ram, topo.nodes()[s].ram_capacity_gb);
  }
  const double rate = topo.spec().server_rate_gbps;

  // Union of VMs treated as one placement unit.
  struct Group {
    std::vector<int> vms;
    double cpu = 0, ram = 0;
    bool alive = true;
  };
  std::vector<Group> groups(n);
  std::vector<int> group_of(n);
  for (int v = 0; v < n; ++v) {
    groups[v].vms = {v};
    groups[v].cpu = workload.vms()[v].cpu_mips;
    groups[v].ram = workload.vms()[v].ram_gb;
    group_of[v] = v;
  }

  auto exchanged = [&](int i, int j) {
    double t = 0.0;
    for (int v : groups[i].vms)
      for (int o : groups[j].vms) t += workload.traffic(v, o) + workload.traffic(o, v);
    return t;
  };
  auto external_out = [&](int i) {
    double t = 0.0;
    for (int v : groups[i].vms)
      for (int o = 0; o < n; ++o)
        if (group_of[o] != i) t += workload.traffic(v, o);
    return t;
  };
  auto external_in = [&](int i) {
    double t = 0.0;
    for (int v : groups[i].vms)
      for (int o = 0; o < n; ++o)
        if (group_of[o] != i) t += workload.traffic(o, v);
    return t;
  };
  auto merge = [&](int into, int from) {
    for (int v : groups[from].vms) group_of[v] = into;
    groups[into].vms.insert(groups[into].vms.end(), groups[from].vms.begin(),
                            groups[from].vms.end());
    std::sort(groups[into].vms.begin(), groups[into].vms.end());
    groups[into].cpu += groups[from].cpu;
    groups[into].ram += groups[from].ram;
    groups[from].alive = false;
  };

  std::string fail_note;

  // VMs whose external traffic cannot clear the server rate must be merged
  // with their peers until it can, whatever the objective.
  for (int pass = 0; pass < n; ++pass) {
    int offender = -1;
    for (int i = 0; i < n && offender < 0; ++i) {
      if (!groups[i].alive) continue;
      if (external_out(i) > rate + kTol) offender = i;
      else if (options.ingress_limit && external_in(i) > rate + kTol) offender = i;
    }
    if (offender < 0) break;
    int partner = -1;
    double best = -1.0;
    for (int j = 0; j < n; ++j) {
      if (j == offender || !groups[j].alive) continue;
      if (groups[offender].cpu + groups[j].cpu > max_cap + kTol) continue;
      if (groups[offender].ram + groups[j].ram > max_ram + kTol) continue;
      const double x = exchanged(offender, j);
      if (x > best + kTol) {
        best = x;
        partner = j;
      }
    }
    if (partner < 0) {
      fail_note = "rate limits demand a co-location that exceeds single-server capacity";
      break;
    }
    merge(std::min(offender, partner), std::max(offender, partner));
  }

  // When networking power counts, co-locating chatty pairs pays for itself;
  // keep merging while the internalized traffic is positive and the merged
  // group still fits somewhere.
  if (mode == ObjectiveMode::PP_AND_NP) {
    for (int pass = 0; pass < n; ++pass) {
      int bi = -1, bj = -1;
      double best = kTol;
      for (int i = 0; i < n; ++i) {
        if (!groups[i].alive) continue;
        for (int j = i + 1; j < n; ++j) {
          if (!groups[j].alive) continue;
          if (groups[i].cpu + groups[j].cpu > max_cap + kTol) continue;
          if (groups[i].ram + groups[j].ram > max_ram + kTol) continue;
          const double x = exchanged(i, j);
          if (x <= best) continue;
          if (external_out(i) + external_out(j) - x > rate + kTol) continue;
          if (options.ingress_limit && external_in(i) + external_in(j) - x > rate + kTol)
            continue;
          best = x;
          bi = i;
          bj = j;
        }
      }
      if (bi < 0) break;
      merge(bi, bj);
    }
  }

  // First-fit decreasing over groups, servers by descending capacity. The
  // rate gate uses the traffic from the server's members to everything else,
  // an overestimate while groups remain unplaced, so a second ungated pass
  // catches what the gate spuriously rejects and leaves repair to sort out.
  std::vector<int> group_order;
  for (int i = 0; i < n; ++i)
    if (groups[i].alive) group_order.push_back(i);
  std::sort(group_order.begin(), group_order.end(), [&](int a, int b) {
    if (groups[a].cpu != groups[b].cpu) return groups[a].cpu > groups[b].cpu;
    return groups[a].vms.front() < groups[b].vms.front();
  });
  std::vector<NodeId> server_order(S);
  for (NodeId s = 0; s < S; ++s) server_order[s] = s;
  std::sort(server_order.begin(), server_order.end(), [&](NodeId a, NodeId b) {
    if (topo.nodes()[a].cpu_capacity_mips != topo.nodes()[b].cpu_capacity_mips)
      return topo.nodes()[a].cpu_capacity_mips > topo.nodes()[b].cpu_capacity_mips;
    return a < b;
  });

  std::vector<NodeId> assignment(n, -1);
  std::vector<double> cpu_used(S, 0.0), ram_used(S, 0.0);
  auto server_rate_after = [&](NodeId s, int g, bool inbound) {
    double t = 0.0;
    auto on_server = [&](int o) {
      return (assignment[o] == s) || group_of[o] == g;
    };
    for (int v = 0; v < n; ++v) {
      if (!on_server(v)) continue;
      for (int o = 0; o < n; ++o) {
        if (on_server(o)) continue;
        t += inbound ? workload.traffic(o, v) : workload.traffic(v, o);
      }
    }
    return t;
  };

  bool packed = true;
  for (int g : group_order) {
    NodeId chosen = -1;
    for (int gated = 1; gated >= 0 && chosen < 0; --gated) {
      for (NodeId s : server_order) {
        if (cpu_used[s] + groups[g].cpu > topo.nodes()[s].cpu_capacity_mips + kTol) continue;
        if (ram_used[s] + groups[g].ram > topo.nodes()[s].ram_capacity_gb + kTol) continue;
        if (gated) {
          if (server_rate_after(s, g, false) > rate + kTol) continue;
          if (options.ingress_limit && server_rate_after(s, g, true) > rate + kTol) continue;
        }
        chosen = s;
        break;
      }
    }
    if (chosen < 0) {
      packed = false;
      if (fail_note.empty()) fail_note = "a placement unit fits on no server";
      break;
    }
    cpu_used[chosen] += groups[g].cpu;
    ram_used[chosen] += groups[g].ram;
    for (int v : groups[g].vms) assignment[v] = chosen;
  }

  if (!packed) {
    rep.note = "heuristic found no feasible placement (" + fail_note + "); not a certificate";
    rep.wall_time_s = seconds_since(t0);
    return rep;
  }

  AssignmentEval ev = evaluate_assignment(topo, workload, assignment, mode, options, params);
  if (!ev.feasible) {
    // Local repair: steepest-descent single-VM moves on (violation mass,
    // objective), bounded and deterministic.
    for (int iter = 0; iter < 64; ++iter) {
      const auto [mass, obj] = assess_assignment(topo, workload, assignment, mode, options,
                                                 params);
      if (mass <= 0) break;
      double best_mass = mass, best_obj = obj;
      int best_v = -1;
      NodeId best_s = -1;
      for (int v = 0; v < n; ++v) {
        const NodeId cur = assignment[v];
        for (NodeId s = 0; s < S; ++s) {
          if (s == cur) continue;
          assignment[v] = s;
          const auto [m2, o2] = assess_assignment(topo, workload, assignment, mode, options,
                                                  params);
          assignment[v] = cur;
          if (m2 < best_mass - 1e-12 ||
              (std::fabs(m2 - best_mass) <= 1e-12 && o2 < best_obj - kObjectiveTol)) {
            best_mass = m2;
            best_obj = o2;
            best_v = v;
            best_s = s;
          }
        }
      }
      if (best_v < 0) break;
      assignment[best_v] = best_s;
    }
    ev = evaluate_assignment(topo, workload, assignment, mode, options, params);
  }

  if (!ev.feasible) {
    rep.note = "heuristic found no feasible placement (last violation: " + ev.reason +
               "); not a certificate";
    rep.wall_time_s = seconds_since(t0);
    return rep;
  }
  rep.status = SolveStatus::Feasible;
  fill_from_eval(rep, std::move(ev));
  rep.wall_time_s = seconds_since(t0);
  return rep;
}

}  // namespace ponplace
