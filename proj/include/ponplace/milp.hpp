#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ponplace/placement.hpp"
#include "ponplace/power.hpp"
#include "ponplace/topology.hpp"
#include "ponplace/workload.hpp"

namespace ponplace {

// PP minimizes hosting-server power only; PP_AND_NP adds relay and ONU power.
enum class ObjectiveMode { PP, PP_AND_NP };
const char* to_string(ObjectiveMode m);
ObjectiveMode objective_mode_from_string(const std::string& s);

struct MilpOptions {
  bool ingress_limit = true;      // rate-limit received traffic like sent traffic
  bool relay_request_cap = false;  // optional cap on distinct flows per relay
};

enum class VarKind : std::uint8_t { Binary, Continuous };
enum class ConstraintSense : std::uint8_t { LE, EQ, GE };

// Variable families (names as they appear in LP exports):
//   Assign      assign_v{v}_s{s}   VM v placed on server s (binary)
//   ServerOn    son_s{s}           server activation (binary)
//   RelayOn     ron_r{r}           relay activation (binary)
//   PairInd     pair_v{v}_o{o}_s{s}_d{d}  v on s AND o on d, s != d;
//               continuous in [0,1], forced integral by its linking rows
//   PairDemand  dem_s{s}_d{d}      aggregated server-to-server demand (Gbps)
//   Flow        flow_s{s}_d{d}_m{m}_n{n}  commodity (s,d) flow on link m->n
//   EgressTotal out_s{s}           total demand leaving server s
//   RelayOut    fwd_r{r}           traffic departing relay r
//   FlowOn      fon_s{s}_d{d}_r{r} commodity-uses-relay indicator (request cap)
enum class VarFamily : std::uint8_t {
  Assign,
  ServerOn,
  RelayOn,
  PairInd,
  PairDemand,
  Flow,
  EgressTotal,
  RelayOut,
  FlowOn,
};

struct Variable {
  std::string name;
  VarKind kind = VarKind::Continuous;
  double lb = 0;
  double ub = 0;
  VarFamily family = VarFamily::Assign;
  std::int32_t i = -1, j = -1, k = -1, l = -1;  // family-specific indices
};

struct LinTerm {
  std::int32_t var = -1;
  double coef = 0;
};

struct Constraint {
  std::string name;
  std::vector<LinTerm> terms;
  ConstraintSense sense = ConstraintSense::LE;
  double rhs = 0;
};

// Constraint families (documented in docs/model.md):
//   C1  assign_v{v}          each VM on exactly one server
//   C2  and_lb/and_ub1/and_ub2  PairInd linearization of Assign AND Assign
//   C3  dem_def_s{s}_d{d}    demand aggregation over split VM pairs
//   C4  flow_bal_s{s}_d{d}_m{m}  per-commodity flow conservation at every node
//   C5  out_def_s{s}         egress totals
//   C6  egress_s{s} / ingress_d{d}  server rate limits
//   C7  fwd_def_r{r} / onu_cap_r{r}  relay forwarding and uplink cap
//   C8  link_cap_m{m}_n{n}   per-link capacity
//   C9  cpu_cap_s{s} / ram_cap_s{s}  server resources (cpu gated on activation)
//   C10 act_v{v}_s{s}        placement implies activation
//   C11 fon_def_* / fwd_cnt_r{r}  optional per-relay request cap
class MilpInstance {
 public:
  const std::vector<Variable>& vars() const { return vars_; }
  const std::vector<Constraint>& constraints() const { return cons_; }
  const std::vector<LinTerm>& objective() const { return objective_; }
  ObjectiveMode mode() const { return mode_; }
  const MilpOptions& options() const { return options_; }
  std::uint64_t topology_hash() const { return topology_hash_; }
  std::uint64_t workload_hash() const { return workload_hash_; }
  int n_vms() const { return n_vms_; }
  int n_servers() const { return n_servers_; }
  int n_relays() const { return n_relays_; }
  int n_links() const { return n_links_; }

  std::size_t count_family(VarFamily f) const;

  // Structured variable lookups; -1 when the variable does not exist
  // (diagonal pairs, disabled options).
  int assign_index(int v, int s) const;
  int server_on_index(int s) const;
  int relay_on_index(int r_pos) const;  // r_pos in [0, n_relays)
  int pair_index(int v, int o, int s, int d) const;
  int pair_demand_index(int s, int d) const;
  int flow_index(int s, int d, int link) const;
  int egress_index(int s) const;
  int relay_out_index(int r_pos) const;

 private:
  friend MilpInstance build_instance(const Topology&, const WorkloadInstance&,
                                     const PowerParams&, ObjectiveMode, const MilpOptions&);
  int pair_pos(int s, int d) const;  // ordered server pairs, s != d

  std::vector<Variable> vars_;
  std::vector<Constraint> cons_;
  std::vector<LinTerm> objective_;
  ObjectiveMode mode_ = ObjectiveMode::PP;
  MilpOptions options_;
  std::uint64_t topology_hash_ = 0;
  std::uint64_t workload_hash_ = 0;
  int n_vms_ = 0, n_servers_ = 0, n_relays_ = 0, n_links_ = 0;
  int assign_base_ = -1, server_on_base_ = -1, relay_on_base_ = -1, pair_base_ = -1,
      dem_base_ = -1, flow_base_ = -1, out_base_ = -1, fwd_base_ = -1, fon_base_ = -1;
};

MilpInstance build_instance(const Topology& topo, const WorkloadInstance& workload,
                            const PowerParams& params, ObjectiveMode mode,
                            const MilpOptions& options = {});

// Variable values a placed and routed solution induces, aligned with
// instance.vars(). Activation variables come from the placement flags, flows
// from the routing.
std::vector<double> solution_vector(const MilpInstance& instance, const Topology& topo,
                                    const WorkloadInstance& workload,
                                    const Placement& placement, const Routing& routing);

double objective_value_at(const MilpInstance& instance, const std::vector<double>& values);

}  // namespace ponplace
