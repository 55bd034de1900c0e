// Command-line driver: instance generation, topology inspection, exact and
// heuristic solves, LP export, experiment sweeps, and report re-derivation.
//
// Exit codes: 0 success, 1 runtime failure, 2 usage error. Sweep subcommands
// return 3 when every run was infeasible and 4 when some runs raised.

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "ponplace/experiments.hpp"
#include "ponplace/feasibility.hpp"
#include "ponplace/lp_format.hpp"
#include "ponplace/milp.hpp"
#include "ponplace/solver.hpp"
#include "ponplace/text_io.hpp"

using namespace ponplace;
using json = nlohmann::ordered_json;

namespace {

void emit(const std::string& out_path, const std::string& content) {
  if (out_path.empty())
    std::cout << content;
  else
    write_file_atomic(out_path, content);
}

void add_arch_flags(CLI::App* cmd, ArchitectureSpec& spec, const char* seed_name) {
  cmd->add_option("--cells", spec.cells, "AWGR cells")->capture_default_str();
  cmd->add_option("--racks-per-cell", spec.racks_per_cell, "racks per cell")
      ->capture_default_str();
  cmd->add_option("--servers-per-rack", spec.servers_per_rack, "hosting servers per rack")
      ->capture_default_str();
  cmd->add_option("--capacity-low", spec.capacity_low_mips,
                  "server CPU capacity draw, lower bound (MIPS)")
      ->capture_default_str();
  cmd->add_option("--capacity-high", spec.capacity_high_mips,
                  "server CPU capacity draw, upper bound (MIPS)")
      ->capture_default_str();
  cmd->add_option("--server-ram-low", spec.ram_low_gb,
                  "server RAM draw, lower bound (GB)")
      ->capture_default_str();
  cmd->add_option("--server-ram-high", spec.ram_high_gb,
                  "server RAM draw, upper bound (GB)")
      ->capture_default_str();
  cmd->add_option("--server-rate", spec.server_rate_gbps,
                  "server external rate limit (Gbps)")
      ->capture_default_str();
  cmd->add_option("--onu-rate", spec.onu_rate_gbps, "relay ONU rate limit (Gbps)")
      ->capture_default_str();
  cmd->add_option("--link-capacity", spec.link_capacity_gbps, "link capacity (Gbps)")
      ->capture_default_str();
  cmd->add_option(seed_name, spec.seed, "seed for capacity and RAM draws")
      ->capture_default_str();
}

void add_workload_flags(CLI::App* cmd, int& vms, std::uint64_t& seed, WorkloadRanges& r) {
  cmd->add_option("--vms", vms, "number of VMs to generate")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  cmd->add_option("--seed", seed, "seed for the VM and traffic draws")
      ->capture_default_str();
  cmd->add_option("--cpu-low", r.cpu_low_mips, "VM CPU draw, lower bound (MIPS)")
      ->capture_default_str();
  cmd->add_option("--cpu-high", r.cpu_high_mips, "VM CPU draw, upper bound (MIPS)")
      ->capture_default_str();
  cmd->add_option("--vm-ram-low", r.ram_low_gb, "VM RAM draw, lower bound (GB)")
      ->capture_default_str();
  cmd->add_option("--vm-ram-high", r.ram_high_gb, "VM RAM draw, upper bound (GB)")
      ->capture_default_str();
  cmd->add_option("--traffic-low", r.traffic_low_gbps,
                  "pairwise traffic draw, lower bound (Gbps)")
      ->capture_default_str();
  cmd->add_option("--traffic-high", r.traffic_high_gbps,
                  "pairwise traffic draw, upper bound (Gbps)")
      ->capture_default_str();
}

WorkloadInstance load_workload(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open workload file: " + path);
  return WorkloadInstance::load(in);
}

ExperimentConfig load_config(const std::string& path) {
  if (path.empty()) return ExperimentConfig{};
  return ExperimentConfig::load_file(path);
}

void print_sweep_summary(const char* label, const SweepOutcome& outcome,
                         const std::string& out_dir) {
  int feasible = 0, errors = 0;
  for (const RunRow& r : outcome.rows) {
    feasible += r.feasible ? 1 : 0;
    errors += r.error ? 1 : 0;
  }
  std::cout << label << ": " << outcome.rows.size() << " rows, " << feasible
            << " feasible, " << errors << " errors\n"
            << "outputs in " << out_dir << "\n";
}

json placement_json(const Topology& topo, const Placement& placement) {
  json j;
  json assignment = json::array();
  for (std::size_t v = 0; v < placement.assignment.size(); ++v) {
    const NodeId s = placement.assignment[v];
    assignment.push_back({{"vm", v}, {"node", s}, {"name", topo.nodes()[s].name}});
  }
  j["assignment"] = assignment;
  json servers = json::array();
  for (NodeId s : placement.active_servers) servers.push_back(topo.nodes()[s].name);
  j["active_servers"] = servers;
  json relays = json::array();
  for (NodeId r : placement.active_relays) relays.push_back(topo.nodes()[r].name);
  j["active_relays"] = relays;
  return j;
}

int run_solve(const Topology& topo, const WorkloadInstance& wl, ObjectiveMode mode,
              const std::string& method, const MilpOptions& options,
              const SolverLimits& limits, const std::string& out_path) {
  SolveReport rep;
  if (method == "exact")
    rep = solve_exact(topo, wl, mode, options, {}, limits);
  else if (method == "heuristic")
    rep = solve_heuristic(topo, wl, mode, options);
  else
    rep = brute_force(topo, wl, mode, options);

  json j;
  j["status"] = to_string(rep.status);
  j["mode"] = to_string(mode);
  j["method"] = method;
  if (rep.status != SolveStatus::Infeasible) {
    j["objective_w"] = rep.objective_w;
    j["lower_bound_w"] = rep.lower_bound_w;
    j["gap"] = rep.status == SolveStatus::Optimal
                   ? 0.0
                   : std::max(0.0, (rep.objective_w - rep.lower_bound_w) /
                                       std::max(rep.objective_w, 1e-12));
    j["power"] = {{"pp_w", rep.power.pp_w},
                  {"np_w", rep.power.np_w},
                  {"total_w", rep.power.total_w}};
  }
  j["nodes_explored"] = rep.nodes_explored;
  j["wall_time_s"] = rep.wall_time_s;
  j["note"] = rep.note;
  if (rep.placement) {
    j["placement"] = placement_json(topo, *rep.placement);
    const FeasibilityReport check =
        check_feasible(topo, wl, *rep.placement, rep.routing, options, {});
    json violations = json::array();
    for (const Violation& v : check.violations)
      violations.push_back(
          {{"constraint", v.constraint}, {"detail", v.detail}, {"residual", v.residual}});
    j["check"] = {{"feasible", check.feasible},
                  {"max_flow_residual", check.max_flow_residual},
                  {"violations", violations}};
  }
  emit(out_path, j.dump(2) + "\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "VM placement over a cascaded-AWGR PON fabric: instance generation, exact and "
      "heuristic power-minimizing solvers, LP export, and experiment sweeps"};
  app.require_subcommand(1);

  // gen
  auto* gen = app.add_subcommand("gen", "generate a workload instance");
  int gen_vms = 7;
  std::uint64_t gen_seed = 1;
  WorkloadRanges gen_ranges;
  std::string gen_out;
  add_workload_flags(gen, gen_vms, gen_seed, gen_ranges);
  gen->add_option("--out", gen_out, "output file (default: stdout)");

  // topo
  auto* topo_cmd = app.add_subcommand("topo", "build and print a fabric description");
  ArchitectureSpec topo_spec;
  std::string topo_out;
  add_arch_flags(topo_cmd, topo_spec, "--seed");
  topo_cmd->add_option("--out", topo_out, "output file (default: stdout)");

  // solve
  auto* solve = app.add_subcommand("solve", "place one workload and report power");
  ArchitectureSpec solve_spec;
  int solve_vms = 7;
  std::uint64_t solve_seed = 1;
  WorkloadRanges solve_ranges;
  std::string solve_workload, solve_mode = "pp_np", solve_method = "exact", solve_out;
  double solve_time_limit = 0;
  std::int64_t solve_node_limit = -1;
  bool solve_no_ingress = false, solve_request_cap = false;
  add_arch_flags(solve, solve_spec, "--topo-seed");
  add_workload_flags(solve, solve_vms, solve_seed, solve_ranges);
  auto* wl_opt =
      solve->add_option("--workload", solve_workload, "load the workload from a file");
  wl_opt->excludes("--vms")->excludes("--seed");
  solve->add_option("--mode", solve_mode, "objective: pp or pp_np")
      ->check(CLI::IsMember({"pp", "pp_np"}))
      ->capture_default_str();
  solve->add_option("--method", solve_method, "exact, heuristic, or brute")
      ->check(CLI::IsMember({"exact", "heuristic", "brute"}))
      ->capture_default_str();
  solve->add_option("--time-limit", solve_time_limit,
                    "wall-clock limit in seconds (0 = none; exact only)");
  solve->add_option("--node-limit", solve_node_limit,
                    "search-node limit (-1 = none; exact only)")
      ->capture_default_str();
  solve->add_flag("--no-ingress-limit", solve_no_ingress,
                  "drop the per-server ingress rate constraint");
  solve->add_flag("--relay-request-cap", solve_request_cap,
                  "cap the commodities a relay may forward");
  solve->add_option("--out", solve_out, "report file (default: stdout)");

  // export-lp
  auto* lp = app.add_subcommand("export-lp", "write the placement program in LP format");
  ArchitectureSpec lp_spec;
  int lp_vms = 7;
  std::uint64_t lp_seed = 1;
  WorkloadRanges lp_ranges;
  std::string lp_workload, lp_mode = "pp_np", lp_out;
  bool lp_no_ingress = false, lp_request_cap = false;
  add_arch_flags(lp, lp_spec, "--topo-seed");
  add_workload_flags(lp, lp_vms, lp_seed, lp_ranges);
  auto* lp_wl_opt = lp->add_option("--workload", lp_workload, "load the workload from a file");
  lp_wl_opt->excludes("--vms")->excludes("--seed");
  lp->add_option("--mode", lp_mode, "objective: pp or pp_np")
      ->check(CLI::IsMember({"pp", "pp_np"}))
      ->capture_default_str();
  lp->add_flag("--no-ingress-limit", lp_no_ingress,
               "drop the per-server ingress rate constraint");
  lp->add_flag("--relay-request-cap", lp_request_cap,
               "cap the commodities a relay may forward");
  lp->add_option("--out", lp_out, "output file (default: stdout)");

  // sweep-vms / sweep-capacity
  auto* sweep_vms = app.add_subcommand("sweep-vms", "run the VM-count grid");
  std::string sv_config, sv_out;
  sweep_vms->add_option("--config", sv_config, "experiment config JSON (default: built-in)");
  sweep_vms->add_option("--out", sv_out, "output directory")->required();

  auto* sweep_cap = app.add_subcommand("sweep-capacity", "run the capacity-scenario grid");
  std::string sc_config, sc_out;
  sweep_cap->add_option("--config", sc_config, "experiment config JSON (default: built-in)");
  sweep_cap->add_option("--out", sc_out, "output directory")->required();

  // report
  auto* report = app.add_subcommand("report", "re-derive reports from an existing sweep");
  std::string rp_dir;
  report->add_option("--dir", rp_dir, "sweep output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (gen->parsed()) {
      const WorkloadInstance wl = WorkloadInstance::generate(gen_vms, gen_ranges, gen_seed);
      emit(gen_out, wl.serialize());
      return 0;
    }
    if (topo_cmd->parsed()) {
      emit(topo_out, Topology::build(topo_spec).serialize());
      return 0;
    }
    if (solve->parsed()) {
      const Topology topo = Topology::build(solve_spec);
      const WorkloadInstance wl =
          solve_workload.empty() ? WorkloadInstance::generate(solve_vms, solve_ranges, solve_seed)
                                 : load_workload(solve_workload);
      MilpOptions options;
      options.ingress_limit = !solve_no_ingress;
      options.relay_request_cap = solve_request_cap;
      SolverLimits limits;
      if (solve_time_limit > 0) limits.time_limit_s = solve_time_limit;
      limits.node_limit = solve_node_limit;
      return run_solve(topo, wl, objective_mode_from_string(solve_mode), solve_method,
                       options, limits, solve_out);
    }
    if (lp->parsed()) {
      const Topology topo = Topology::build(lp_spec);
      const WorkloadInstance wl =
          lp_workload.empty() ? WorkloadInstance::generate(lp_vms, lp_ranges, lp_seed)
                              : load_workload(lp_workload);
      MilpOptions options;
      options.ingress_limit = !lp_no_ingress;
      options.relay_request_cap = lp_request_cap;
      const MilpInstance inst =
          build_instance(topo, wl, {}, objective_mode_from_string(lp_mode), options);
      emit(lp_out, to_lp_string(inst));
      return 0;
    }
    if (sweep_vms->parsed()) {
      const SweepOutcome outcome = run_vm_sweep(load_config(sv_config), sv_out);
      print_sweep_summary("vm sweep", outcome, sv_out);
      return outcome.exit_code;
    }
    if (sweep_cap->parsed()) {
      const SweepOutcome outcome = run_capacity_sweep(load_config(sc_config), sc_out);
      print_sweep_summary("capacity sweep", outcome, sc_out);
      return outcome.exit_code;
    }
    if (report->parsed()) {
      const int code = reaggregate_dir(rp_dir);
      std::cout << "reports rebuilt in " << rp_dir << "\n";
      return code;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
