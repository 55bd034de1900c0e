#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "doctest.h"
#include "ponplace/feasibility.hpp"
#include "ponplace/solver.hpp"

using namespace ponplace;

namespace {

ArchitectureSpec one_cell(int racks = 2, int servers = 2) {
  ArchitectureSpec s;
  s.cells = 1;
  s.racks_per_cell = racks;
  s.servers_per_rack = servers;
  return s;
}

ArchitectureSpec pinned_caps(double cap, int racks = 2, int servers = 2) {
  ArchitectureSpec s = one_cell(racks, servers);
  s.capacity_low_mips = cap;
  s.capacity_high_mips = cap;
  s.ram_low_gb = 32.0;
  s.ram_high_gb = 32.0;
  return s;
}

// Traffic low enough that the 1 Gbps server rate never binds; cpu demand is
// what drives these instances.
WorkloadRanges light_traffic() {
  WorkloadRanges r;
  r.traffic_low_gbps = 0.001;
  r.traffic_high_gbps = 0.027;
  return r;
}

WorkloadInstance hand_workload(std::vector<double> cpus, std::vector<double> traffic,
                               double ram = 1.0) {
  std::vector<Vm> vms;
  for (size_t v = 0; v < cpus.size(); ++v)
    vms.push_back({static_cast<int>(v), cpus[v], ram});
  if (traffic.empty()) traffic.assign(cpus.size() * cpus.size(), 0.0);
  return WorkloadInstance::from_parts(std::move(vms), std::move(traffic), {}, 0);
}

}  // namespace

TEST_CASE("branch and bound agrees with exhaustive enumeration") {
  const Topology topo = Topology::build(one_cell());
  for (std::uint64_t seed = 1; seed <= 12; ++seed) {
    const WorkloadInstance wl = WorkloadInstance::generate(4, light_traffic(), seed);
    for (ObjectiveMode mode : {ObjectiveMode::PP, ObjectiveMode::PP_AND_NP}) {
      CAPTURE(seed);
      CAPTURE(to_string(mode));
      const SolveReport ref = brute_force(topo, wl, mode);
      const SolveReport got = solve_exact(topo, wl, mode);
      REQUIRE(got.status == ref.status);
      if (ref.status == SolveStatus::Optimal) {
        CHECK(got.objective_w == doctest::Approx(ref.objective_w).epsilon(1e-9));
        CHECK(got.lower_bound_w == doctest::Approx(got.objective_w).epsilon(1e-12));
        REQUIRE(got.placement.has_value());
        const FeasibilityReport fr =
            check_feasible(topo, wl, *got.placement, got.routing);
        CHECK(fr.feasible);
      }
    }
  }
}

TEST_CASE("exact ties break to the same assignment the enumerator keeps") {
  // Equal VM sizes make every two-server split cost bitwise the same, so the
  // tie rule, not the bound, decides the answer.
  const Topology topo = Topology::build(pinned_caps(7000.0));
  const WorkloadInstance wl = hand_workload({3000, 3000, 3000, 3000}, {});
  for (ObjectiveMode mode : {ObjectiveMode::PP, ObjectiveMode::PP_AND_NP}) {
    CAPTURE(to_string(mode));
    const SolveReport ref = brute_force(topo, wl, mode);
    const SolveReport got = solve_exact(topo, wl, mode);
    REQUIRE(ref.status == SolveStatus::Optimal);
    REQUIRE(got.status == SolveStatus::Optimal);
    REQUIRE(got.placement.has_value());
    REQUIRE(ref.placement.has_value());
    CHECK(got.placement->assignment == ref.placement->assignment);
    CHECK(got.placement->assignment == std::vector<NodeId>{0, 0, 1, 1});
  }
}

TEST_CASE("single oversized vm forces a lexicographically minimal solo split") {
  const Topology topo = Topology::build(pinned_caps(7000.0));
  // One 5000 MIPS VM pairs with nobody; the rest tie across servers.
  const WorkloadInstance wl = hand_workload({5000, 2000, 2000, 2000}, {});
  const SolveReport ref = brute_force(topo, wl, ObjectiveMode::PP);
  const SolveReport got = solve_exact(topo, wl, ObjectiveMode::PP);
  REQUIRE(ref.status == SolveStatus::Optimal);
  REQUIRE(got.status == SolveStatus::Optimal);
  CHECK(got.objective_w == doctest::Approx(ref.objective_w).epsilon(1e-12));
  CHECK(got.placement->assignment == ref.placement->assignment);
}

TEST_CASE("adding networking power never improves it beyond the joint optimum") {
  const Topology topo = Topology::build(one_cell());
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    const WorkloadInstance wl = WorkloadInstance::generate(4, light_traffic(), seed);
    const SolveReport pp = solve_exact(topo, wl, ObjectiveMode::PP);
    const SolveReport both = solve_exact(topo, wl, ObjectiveMode::PP_AND_NP);
    if (pp.status != SolveStatus::Optimal) continue;
    CAPTURE(seed);
    REQUIRE(both.status == SolveStatus::Optimal);
    // The processing-only optimum lower-bounds any placement's pp cost, and
    // the joint optimum lower-bounds any placement's total cost.
    CHECK(pp.power.pp_w <= both.power.pp_w + 1e-9);
    CHECK(both.power.total_w <= pp.power.total_w + 1e-9);
  }
}

TEST_CASE("the heuristic stays feasible and above the exact optimum") {
  const Topology topo = Topology::build(one_cell());
  for (std::uint64_t seed = 1; seed <= 8; ++seed) {
    const WorkloadInstance wl = WorkloadInstance::generate(4, light_traffic(), seed);
    for (ObjectiveMode mode : {ObjectiveMode::PP, ObjectiveMode::PP_AND_NP}) {
      const SolveReport exact = solve_exact(topo, wl, mode);
      if (exact.status != SolveStatus::Optimal) continue;
      CAPTURE(seed);
      CAPTURE(to_string(mode));
      const SolveReport heur = solve_heuristic(topo, wl, mode);
      REQUIRE(heur.status == SolveStatus::Feasible);
      REQUIRE(heur.placement.has_value());
      CHECK(heur.objective_w >= exact.objective_w - 1e-9);
      const FeasibilityReport fr =
          check_feasible(topo, wl, *heur.placement, heur.routing);
      CHECK(fr.feasible);
      // Replaying the heuristic's assignment through the shared evaluator
      // reproduces its reported objective.
      const AssignmentEval ev =
          evaluate_assignment(topo, wl, heur.placement->assignment, mode);
      REQUIRE(ev.feasible);
      CHECK(ev.objective_w == doctest::Approx(heur.objective_w).epsilon(1e-12));
    }
  }
}

TEST_CASE("solving twice yields identical reports") {
  const Topology topo = Topology::build(one_cell());
  const WorkloadInstance wl = WorkloadInstance::generate(5, light_traffic(), 11);
  for (ObjectiveMode mode : {ObjectiveMode::PP, ObjectiveMode::PP_AND_NP}) {
    const SolveReport a = solve_exact(topo, wl, mode);
    const SolveReport b = solve_exact(topo, wl, mode);
    CHECK(a.status == b.status);
    CHECK(a.objective_w == b.objective_w);
    CHECK(a.lower_bound_w == b.lower_bound_w);
    CHECK(a.nodes_explored == b.nodes_explored);
    CHECK(a.note == b.note);
    if (a.placement.has_value()) {
      REQUIRE(b.placement.has_value());
      CHECK(a.placement->assignment == b.placement->assignment);
    }
  }
}

TEST_CASE("presolve certifies an oversized vm") {
  const Topology topo = Topology::build(pinned_caps(10000.0));
  const WorkloadInstance wl = hand_workload({20000, 1000}, {});
  const std::string cert = presolve_certificate(topo, wl);
  REQUIRE(!cert.empty());
  CHECK(cert.find("vm 0 needs") != std::string::npos);
  CHECK(cert.find("largest server offers") != std::string::npos);
  const SolveReport rep = solve_exact(topo, wl, ObjectiveMode::PP);
  CHECK(rep.status == SolveStatus::Infeasible);
  CHECK(rep.note.rfind("infeasibility certificate: ", 0) == 0);
  CHECK(!rep.placement.has_value());
}

TEST_CASE("presolve certifies aggregate cpu overflow") {
  const Topology topo = Topology::build(pinned_caps(7000.0));
  const WorkloadInstance wl = hand_workload({6000, 6000, 6000, 6000, 6000}, {});
  const std::string cert = presolve_certificate(topo, wl);
  REQUIRE(!cert.empty());
  CHECK(cert.find("total cpu demand") != std::string::npos);
  CHECK(solve_exact(topo, wl, ObjectiveMode::PP).status == SolveStatus::Infeasible);
  CHECK(brute_force(topo, wl, ObjectiveMode::PP).status == SolveStatus::Infeasible);
}

TEST_CASE("presolve certifies unabsorbable egress") {
  // vm 0 emits 3.3 Gbps toward a peer it cannot fully co-host: at most a
  // 4000/6000 fraction of the peer fits alongside it, leaving 1.1 Gbps on the
  // wire against a 1 Gbps server rate.
  const Topology topo = Topology::build(pinned_caps(10000.0));
  const WorkloadInstance wl = hand_workload({6000, 6000}, {0.0, 3.3, 0.0, 0.0});
  const std::string cert = presolve_certificate(topo, wl);
  REQUIRE(!cert.empty());
  CHECK(cert.find("vm 0 must send") != std::string::npos);
  CHECK(cert.find("the server rate is 1") != std::string::npos);
  CHECK(solve_exact(topo, wl, ObjectiveMode::PP_AND_NP).status == SolveStatus::Infeasible);
}

TEST_CASE("uncertified infeasibility is proven by exhausting the search") {
  // Three VMs that cannot share servers (2 x 4000 > 7000) yet each emits
  // 1.6 Gbps when alone. The fractional absorption bound stays under the
  // rate, so only the search itself can prove there is no placement.
  const Topology topo = Topology::build(pinned_caps(7000.0));
  const WorkloadInstance wl =
      hand_workload({4000, 4000, 4000}, {0.0, 0.8, 0.8, 0.8, 0.0, 0.8, 0.8, 0.8, 0.0});
  CHECK(presolve_certificate(topo, wl).empty());
  const SolveReport ref = brute_force(topo, wl, ObjectiveMode::PP);
  const SolveReport got = solve_exact(topo, wl, ObjectiveMode::PP);
  CHECK(ref.status == SolveStatus::Infeasible);
  REQUIRE(got.status == SolveStatus::Infeasible);
  CHECK(got.note == "search exhausted; no feasible assignment exists");
}

TEST_CASE("idle-plus-load pricing matches hand arithmetic at both capacities") {
  // One 5000 MIPS VM on a single server: 202 W fixed plus a 100 W load term
  // scaled by utilization. Raising capacity from 6800 to 10800 MIPS cuts the
  // load share from 73.53 to 46.30 W.
  const WorkloadInstance wl = hand_workload({5000}, {});
  for (ObjectiveMode mode : {ObjectiveMode::PP, ObjectiveMode::PP_AND_NP}) {
    const Topology low = Topology::build(pinned_caps(6800.0, 1, 1));
    const Topology high = Topology::build(pinned_caps(10800.0, 1, 1));
    const SolveReport at_low = solve_exact(low, wl, mode);
    const SolveReport at_high = solve_exact(high, wl, mode);
    REQUIRE(at_low.status == SolveStatus::Optimal);
    REQUIRE(at_high.status == SolveStatus::Optimal);
    CHECK(at_low.objective_w ==
          doctest::Approx(202.0 + 100.0 * 5000.0 / 6800.0).epsilon(1e-12));
    CHECK(at_high.objective_w ==
          doctest::Approx(202.0 + 100.0 * 5000.0 / 10800.0).epsilon(1e-12));
    CHECK(at_high.objective_w < at_low.objective_w);
    CHECK(brute_force(low, wl, mode).objective_w ==
          doctest::Approx(at_low.objective_w).epsilon(1e-12));
  }
}

TEST_CASE("faster servers never raise the optimal processing power") {
  WorkloadRanges ranges = light_traffic();
  ranges.cpu_high_mips = 6800.0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const WorkloadInstance wl = WorkloadInstance::generate(4, ranges, seed);
    const SolveReport slow =
        solve_exact(Topology::build(pinned_caps(6800.0)), wl, ObjectiveMode::PP);
    const SolveReport fast =
        solve_exact(Topology::build(pinned_caps(10800.0)), wl, ObjectiveMode::PP);
    CAPTURE(seed);
    REQUIRE(slow.status == SolveStatus::Optimal);
    REQUIRE(fast.status == SolveStatus::Optimal);
    CHECK(fast.objective_w <= slow.objective_w + 1e-9);
  }
}

TEST_CASE("a zero node budget returns the seeded incumbent with an honest gap") {
  const Topology topo = Topology::build(one_cell());
  WorkloadRanges ranges = light_traffic();
  ranges.cpu_high_mips = 6800.0;  // fits any capacity draw, so never certified
  const WorkloadInstance wl = WorkloadInstance::generate(4, ranges, 2);
  SolverLimits limits;
  limits.node_limit = 0;
  const SolveReport rep = solve_exact(topo, wl, ObjectiveMode::PP_AND_NP, {}, {}, limits);
  REQUIRE(rep.status == SolveStatus::Feasible);
  CHECK(rep.note.find("node limit reached") != std::string::npos);
  CHECK(rep.note.find("incumbent may be suboptimal") != std::string::npos);
  CHECK(rep.lower_bound_w <= rep.objective_w + 1e-12);
  REQUIRE(rep.placement.has_value());
  CHECK(check_feasible(topo, wl, *rep.placement, rep.routing).feasible);
}

TEST_CASE("limit validation rejects degenerate time budgets") {
  SolverLimits ok;
  CHECK_NOTHROW(ok.validate());
  ok.node_limit = -5;  // any negative value means unlimited
  CHECK_NOTHROW(ok.validate());
  SolverLimits zero;
  zero.time_limit_s = 0.0;
  CHECK_THROWS_AS(zero.validate(), std::invalid_argument);
  SolverLimits nan;
  nan.time_limit_s = std::nan("");
  CHECK_THROWS_AS(nan.validate(), std::invalid_argument);
}

TEST_CASE("an empty workload solves to an empty optimal placement") {
  const Topology topo = Topology::build(one_cell());
  const WorkloadInstance wl = WorkloadInstance::from_parts({}, {}, {}, 0);
  for (const SolveReport& rep :
       {solve_exact(topo, wl, ObjectiveMode::PP_AND_NP),
        brute_force(topo, wl, ObjectiveMode::PP_AND_NP),
        solve_heuristic(topo, wl, ObjectiveMode::PP_AND_NP)}) {
    CHECK(rep.status == SolveStatus::Optimal);
    CHECK(rep.objective_w == 0.0);
    REQUIRE(rep.placement.has_value());
    CHECK(rep.placement->assignment.empty());
    CHECK(rep.placement->active_servers.empty());
    CHECK(rep.power.total_w == 0.0);
  }
}

TEST_CASE("assignment evaluation enforces its contract") {
  const Topology topo = Topology::build(one_cell());
  const WorkloadInstance wl = WorkloadInstance::generate(3, light_traffic(), 1);
  CHECK_THROWS_AS(evaluate_assignment(topo, wl, {0, 1}, ObjectiveMode::PP),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      evaluate_assignment(topo, wl, {0, 1, topo.relay_of_cell(0)}, ObjectiveMode::PP),
      std::invalid_argument);

  const Topology tight = Topology::build(pinned_caps(7000.0));
  const WorkloadInstance heavy = hand_workload({4000, 4000}, {});
  const AssignmentEval ev = evaluate_assignment(tight, heavy, {0, 0}, ObjectiveMode::PP);
  CHECK(!ev.feasible);
  CHECK(ev.reason.find("cpu capacity exceeded") != std::string::npos);
}

TEST_CASE("exhaustive enumeration refuses oversized search spaces") {
  const Topology topo = Topology::build(one_cell());  // 4 servers
  const WorkloadInstance wl = WorkloadInstance::generate(12, light_traffic(), 1);
  CHECK_THROWS_AS(brute_force(topo, wl, ObjectiveMode::PP), std::invalid_argument);
}

TEST_CASE("solve status names round-trip") {
  CHECK(std::string(to_string(SolveStatus::Optimal)) == "optimal");
  CHECK(std::string(to_string(SolveStatus::Feasible)) == "feasible");
  CHECK(std::string(to_string(SolveStatus::Infeasible)) == "infeasible");
}
