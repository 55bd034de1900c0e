// Release gate for the placement stack. Each criterion prints exactly one
// PASS/FAIL line; the process exits with the number of failures. Tolerances
// are pinned here on purpose: loosening them is a visible diff.
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "ponplace/experiments.hpp"
#include "ponplace/feasibility.hpp"
#include "ponplace/lp_format.hpp"
#include "ponplace/milp.hpp"
#include "ponplace/solver.hpp"

using namespace ponplace;
namespace fs = std::filesystem;

namespace {

constexpr double kAgreeTol = 1e-6;     // solver-vs-oracle objective agreement
constexpr double kDominanceTol = 1e-9; // objective dominance comparisons
constexpr double kResidualTol = 1e-9;  // flow conservation residual

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt1(double v) {
  std::ostringstream ss;
  ss.precision(1);
  ss << std::fixed << v;
  return ss.str();
}

// One small-fabric instance per seed, sizes cycling 1..5, half the seeds with
// traffic light enough to always fit and half heavy enough that co-location
// pressure makes some instances infeasible. Exercises both solver outcomes.
struct SmallCase {
  std::uint64_t seed;
  ObjectiveMode mode;
  WorkloadInstance wl;
  SolveReport exact;
};

WorkloadRanges small_case_ranges(std::uint64_t seed) {
  WorkloadRanges r;
  if (seed <= 25) {
    r.traffic_low_gbps = 0.001;
    r.traffic_high_gbps = 0.027;
  } else {
    r.traffic_low_gbps = 0.05;
    r.traffic_high_gbps = 1.35;
  }
  return r;
}

ArchitectureSpec small_fabric() {
  ArchitectureSpec s;
  s.cells = 1;
  s.racks_per_cell = 4;
  s.servers_per_rack = 2;
  return s;
}

struct Gate {
  int failures = 0;

  void run(int id, const std::string& what, const std::function<std::string()>& body) {
    std::string detail;
    bool ok = true;
    try {
      detail = body();  // empty on success, reason on failure
      ok = detail.empty() || detail[0] != '!';
    } catch (const std::exception& e) {
      ok = false;
      detail = std::string("!exception: ") + e.what();
    }
    if (!ok) ++failures;
    std::cout << (ok ? "PASS" : "FAIL") << " criterion " << id << ": " << what;
    if (!detail.empty()) std::cout << " [" << (detail[0] == '!' ? detail.substr(1) : detail) << "]";
    std::cout << std::endl;
  }
};

}  // namespace

int main() {
  Gate gate;
  const Topology small_topo = Topology::build(small_fabric());
  std::vector<SmallCase> small_cases;

  // 1: branch and bound reproduces exhaustive enumeration, status and
  // objective, across 100 seeded instances of up to five VMs in both modes.
  gate.run(1, "exact solver matches exhaustive enumeration on 100 small instances", [&] {
    const auto t0 = std::chrono::steady_clock::now();
    int compared = 0, optimal = 0, infeasible = 0;
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
      const int n = 1 + static_cast<int>((seed - 1) % 5);
      const WorkloadInstance wl =
          WorkloadInstance::generate(n, small_case_ranges(seed), seed);
      for (ObjectiveMode mode : {ObjectiveMode::PP, ObjectiveMode::PP_AND_NP}) {
        const SolveReport ref = brute_force(small_topo, wl, mode);
        SolveReport got = solve_exact(small_topo, wl, mode);
        ++compared;
        if (got.status != ref.status)
          return "!seed " + std::to_string(seed) + " " + to_string(mode) +
                 ": status " + to_string(got.status) + " vs " + to_string(ref.status);
        if (ref.status == SolveStatus::Optimal) {
          ++optimal;
          if (std::fabs(got.objective_w - ref.objective_w) > kAgreeTol)
            return "!seed " + std::to_string(seed) + " " + to_string(mode) +
                   ": objective differs by " +
                   std::to_string(got.objective_w - ref.objective_w);
          small_cases.push_back({seed, mode, wl, std::move(got)});
        } else {
          ++infeasible;
        }
      }
    }
    const double dt = seconds_since(t0);
    if (dt >= 300.0) return "!took " + fmt1(dt) + "s, budget is 300s";
    return std::to_string(compared) + " instances agree (" + std::to_string(optimal) +
           " optimal, " + std::to_string(infeasible) + " infeasible) in " + fmt1(dt) + "s";
  });

  // 2: every optimum from criterion 1 passes the independent feasibility
  // checker and reprices identically through the assembled constraint matrix.
  gate.run(2, "optima satisfy the checker and the term-list objective", [&] {
    if (small_cases.empty()) return std::string("!criterion 1 left no optima to check");
    for (const SmallCase& c : small_cases) {
      const FeasibilityReport fr =
          check_feasible(small_topo, c.wl, *c.exact.placement, c.exact.routing);
      if (!fr.feasible)
        return "!seed " + std::to_string(c.seed) + ": checker says " +
               fr.violations.front().constraint;
      const MilpInstance mi =
          build_instance(small_topo, c.wl, PowerParams{}, c.mode, MilpOptions{});
      const std::vector<double> x =
          solution_vector(mi, small_topo, c.wl, *c.exact.placement, c.exact.routing);
      const double relisted = objective_value_at(mi, x);
      if (std::fabs(relisted - c.exact.objective_w) > kAgreeTol)
        return "!seed " + std::to_string(c.seed) + ": term list gives " +
               std::to_string(relisted) + " vs " + std::to_string(c.exact.objective_w);
    }
    return std::to_string(small_cases.size()) + " optima verified";
  });

  // 3: the reference demand ranges are certified infeasible on the reference
  // fabric (transparently, per run), and a proportionally scaled-down demand
  // grid shows the joint objective cutting networking power at every count.
  gate.run(3, "joint optimization reduces networking power across the sweep", [&] {
    const auto t0 = std::chrono::steady_clock::now();
    const Topology ref_topo = Topology::build(ArchitectureSpec{});
    for (int count : {7, 14, 21})
      for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const WorkloadInstance wl = WorkloadInstance::generate(count, WorkloadRanges{}, seed);
        if (presolve_certificate(ref_topo, wl).empty())
          return "!expected a certificate at count " + std::to_string(count) + " seed " +
                 std::to_string(seed);
      }
    {
      const SolveReport rep = solve_exact(
          ref_topo, WorkloadInstance::generate(7, WorkloadRanges{}, 1), ObjectiveMode::PP);
      if (rep.status != SolveStatus::Infeasible ||
          rep.note.rfind("infeasibility certificate: ", 0) != 0)
        return std::string("!reference-demand run did not report its certificate");
    }

    ExperimentConfig cfg;
    cfg.workload.traffic_low_gbps = 0.0001;
    cfg.workload.traffic_high_gbps = 0.0027;
    cfg.node_limit_per_count = {{14, 2000000}, {21, 2000000}};
    const fs::path dir = fs::temp_directory_path() / "ponplace_acceptance_sweep";
    fs::remove_all(dir);
    const SweepOutcome out = run_vm_sweep(cfg, dir.string());
    if (out.exit_code != 0) return "!sweep exit code " + std::to_string(out.exit_code);

    std::string cells_note;
    int cells_ge_50 = 0;
    for (int count : {7, 14, 21}) {
      double sum = 0;
      int cells = 0;
      for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const RunRow *pp = nullptr, *both = nullptr;
        for (const RunRow& r : out.rows) {
          if (r.vm_count != count || r.seed != seed) continue;
          (r.mode == ObjectiveMode::PP ? pp : both) = &r;
        }
        if (!pp || !both || !pp->feasible || !both->feasible)
          return "!count " + std::to_string(count) + " seed " + std::to_string(seed) +
                 " missing a feasible pair";
        if (count == 7 && (pp->status != SolveStatus::Optimal ||
                           both->status != SolveStatus::Optimal))
          return std::string("!count 7 must solve to optimality");
        if (pp->status == SolveStatus::Optimal && both->status == SolveStatus::Optimal) {
          if (pp->pp_w > both->pp_w + kDominanceTol)
            return "!processing-only optimum above joint pp at count " +
                   std::to_string(count);
          if (both->total_w > pp->total_w + kDominanceTol)
            return "!joint optimum above processing-only total at count " +
                   std::to_string(count);
        }
        if (pp->np_w > 0) {
          const double reduction = (pp->np_w - both->np_w) / pp->np_w * 100.0;
          sum += reduction;
          ++cells;
          if (reduction >= 50.0) ++cells_ge_50;
        }
      }
      if (cells == 0) return "!count " + std::to_string(count) + " has no comparable cells";
      const double mean = sum / cells;
      if (mean <= 0.0)
        return "!count " + std::to_string(count) + " mean reduction " + fmt1(mean) + "%";
      cells_note += (cells_note.empty() ? "" : ", ") + std::to_string(count) + " VMs: " +
                    fmt1(mean) + "%";
    }
    if (cells_ge_50 < 1) return std::string("!no cell reaches a 50% reduction");
    const double dt = seconds_since(t0);
    if (dt >= 1800.0) return "!took " + fmt1(dt) + "s, budget is 1800s";
    return "mean np reduction " + cells_note + "; " + std::to_string(cells_ge_50) +
           " cells >= 50%; " + fmt1(dt) + "s";
  });

  // 4: on the same seven-VM workload, raising every server's capacity never
  // raises the optimal processing power, seed by seed.
  gate.run(4, "faster servers never raise optimal processing power (10 seeds)", [&] {
    WorkloadRanges ranges;
    ranges.cpu_high_mips = 6800.0;
    ranges.traffic_low_gbps = 0.0001;
    ranges.traffic_high_gbps = 0.0027;
    ArchitectureSpec slow_spec = small_fabric(), fast_spec = small_fabric();
    slow_spec.capacity_low_mips = slow_spec.capacity_high_mips = 6800.0;
    fast_spec.capacity_low_mips = fast_spec.capacity_high_mips = 10800.0;
    const Topology slow = Topology::build(slow_spec), fast = Topology::build(fast_spec);
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      const WorkloadInstance wl = WorkloadInstance::generate(7, ranges, seed);
      const SolveReport at_slow = solve_exact(slow, wl, ObjectiveMode::PP);
      const SolveReport at_fast = solve_exact(fast, wl, ObjectiveMode::PP);
      if (at_slow.status != SolveStatus::Optimal || at_fast.status != SolveStatus::Optimal)
        return "!seed " + std::to_string(seed) + " did not solve to optimality";
      if (at_fast.objective_w > at_slow.objective_w + kDominanceTol)
        return "!seed " + std::to_string(seed) + ": " +
               std::to_string(at_fast.objective_w) + " > " +
               std::to_string(at_slow.objective_w);
    }
    return std::string("10/10 seeds monotone");
  });

  // 5: the linearization rows pin every pair indicator to the AND of its two
  // assignment variables once assignments are integral; intervals implied by
  // the actual rows must collapse exactly, with no slack.
  gate.run(5, "pair indicators collapse to AND under 1000 integral assignments", [&] {
    const WorkloadInstance wl = WorkloadInstance::generate(7, WorkloadRanges{}, 1);
    const Topology topo = Topology::build(ArchitectureSpec{});
    const MilpInstance mi =
        build_instance(topo, wl, PowerParams{}, ObjectiveMode::PP_AND_NP, MilpOptions{});
    const auto& vars = mi.vars();
    const auto& cons = mi.constraints();

    // Rows that link exactly one pair indicator to assignment variables.
    std::vector<std::vector<int>> rows_of(vars.size());
    for (int ci = 0; ci < static_cast<int>(cons.size()); ++ci) {
      int pair_var = -1, pair_terms = 0;
      bool assign_only = true;
      for (const LinTerm& t : cons[ci].terms) {
        if (vars[t.var].family == VarFamily::PairInd) {
          ++pair_terms;
          pair_var = t.var;
        } else if (vars[t.var].family != VarFamily::Assign) {
          assign_only = false;
        }
      }
      if (pair_terms == 1 && assign_only) rows_of[pair_var].push_back(ci);
    }

    const int S = mi.n_servers();
    std::vector<NodeId> assignment(wl.size());
    std::mt19937_64 rng(42);
    for (int trial = 0; trial < 1000; ++trial) {
      for (auto& a : assignment) a = static_cast<NodeId>(rng() % S);
      for (int pv = 0; pv < static_cast<int>(vars.size()); ++pv) {
        if (rows_of[pv].empty()) continue;
        const Variable& p = vars[pv];
        double lo = p.lb, hi = p.ub;
        for (int ci : rows_of[pv]) {
          const Constraint& c = cons[ci];
          double acc = 0, cp = 0;
          for (const LinTerm& t : c.terms) {
            if (t.var == pv)
              cp = t.coef;
            else
              acc += t.coef * (assignment[vars[t.var].i] == vars[t.var].j ? 1.0 : 0.0);
          }
          const double res = (c.rhs - acc) / cp;
          const bool upper = (c.sense == ConstraintSense::LE) == (cp > 0);
          if (c.sense == ConstraintSense::EQ) {
            lo = std::max(lo, res);
            hi = std::min(hi, res);
          } else if (upper) {
            hi = std::min(hi, res);
          } else {
            lo = std::max(lo, res);
          }
        }
        const double expected =
            (assignment[p.i] == p.k && assignment[p.j] == p.l) ? 1.0 : 0.0;
        if (lo != expected || hi != expected)
          return "!trial " + std::to_string(trial) + " " + p.name + " interval [" +
                 std::to_string(lo) + ", " + std::to_string(hi) + "] expected " +
                 std::to_string(expected);
      }
    }
    return std::string("all intervals collapse exactly across 1000 assignments");
  });

  // 6: the power constants behave exactly as documented.
  gate.run(6, "power model constants are exact", [&] {
    const PowerParams p;
    if (server_power(p, true, 6800.0, 6800.0) != 302.0)
      return std::string("!full-load server is not 302 W");
    if (server_power(p, true, 3400.0, 6800.0) != 252.0)
      return std::string("!half-load server is not 252 W");
    if (server_power(p, false, 0.0, 6800.0) != 0.0)
      return std::string("!idle-off server is not 0 W");
    const auto [relay_w, onu_w] = relay_power(p, true, 0.0, 10.0);
    if (relay_w != 201.0 || onu_w != 2.5)
      return std::string("!idle relay is not (201, 2.5) W");
    return std::string("302 W full load, 252 W half load, (201, 2.5) W idle relay");
  });

  // 7: a sweep driven by one config writes byte-identical result rows on
  // every run.
  gate.run(7, "sweep outputs are byte-reproducible", [&] {
    ExperimentConfig cfg;
    cfg.architecture = small_fabric();
    cfg.workload.traffic_low_gbps = 0.001;
    cfg.workload.traffic_high_gbps = 0.027;
    cfg.vm_counts = {3, 5};
    cfg.seeds = {1, 2, 3, 4};
    const fs::path a = fs::temp_directory_path() / "ponplace_acceptance_repro_a";
    const fs::path b = fs::temp_directory_path() / "ponplace_acceptance_repro_b";
    fs::remove_all(a);
    fs::remove_all(b);
    run_vm_sweep(cfg, a.string());
    run_vm_sweep(cfg, b.string());
    auto slurp = [](const fs::path& p) {
      std::ifstream in(p, std::ios::binary);
      std::ostringstream ss;
      ss << in.rdbuf();
      return ss.str();
    };
    for (const char* name :
         {"rows.csv", "aggregates.csv", "reductions.csv", "summary.json", "config.json"}) {
      if (slurp(a / name) != slurp(b / name))
        return std::string("!") + name + " differs between runs";
      if (slurp(a / name).empty()) return std::string("!") + name + " is empty";
    }
    return std::string("rows and derived reports identical across two runs");
  });

  // 8: routed solutions conserve flow to within 1e-9 at every node, measured
  // by the checker, not the router.
  gate.run(8, "flow conservation residual stays within 1e-9", [&] {
    if (small_cases.empty()) return std::string("!criterion 1 left no optima to check");
    double worst = 0.0;
    for (const SmallCase& c : small_cases) {
      const FeasibilityReport fr =
          check_feasible(small_topo, c.wl, *c.exact.placement, c.exact.routing);
      worst = std::max(worst, fr.max_flow_residual);
    }
    if (worst > kResidualTol)
      return "!max residual " + std::to_string(worst);
    std::ostringstream ss;
    ss.precision(3);
    ss << std::scientific << worst;
    return "max residual " + ss.str() + " over " + std::to_string(small_cases.size()) +
           " solutions";
  });

  if (gate.failures == 0)
    std::cout << "ALL CRITERIA PASS" << std::endl;
  else
    std::cout << gate.failures << " CRITERIA FAILED" << std::endl;
  return gate.failures;
}
