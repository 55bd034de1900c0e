#include "ponplace/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "ponplace/errors.hpp"
#include "ponplace/text_io.hpp"

namespace ponplace {

namespace {

using json = nlohmann::ordered_json;

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return fallback;
  return it->get<T>();
}

std::string sanitize_note(std::string s) {
  for (char& c : s)
    if (c == ',') c = ';';
    else if (c == '\n' || c == '\r') c = ' ';
  return s;
}

const char* status_label(const RunRow& row) {
  if (row.error) return "error";
  return to_string(row.status);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  size_t start = 0;
  while (true) {
    const size_t pos = line.find(',', start);
    if (pos == std::string::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

constexpr const char* kRowsHeader =
    "sweep,vm_count,capacity_low_mips,capacity_high_mips,seed,mode,status,pp_w,np_w,total_w,"
    "gap,nodes,note";

int exit_code_for(const std::vector<RunRow>& rows) {
  bool any_error = false, any_feasible = false;
  for (const RunRow& r : rows) {
    any_error |= r.error;
    any_feasible |= r.feasible;
  }
  if (any_error) return 4;
  if (!rows.empty() && !any_feasible) return 3;
  return 0;
}

}  // namespace

void ExperimentConfig::validate() const {
  architecture.validate();
  power.validate();
  workload.validate();
  if (vm_counts.empty()) throw std::invalid_argument("vm_counts must be non-empty");
  for (int c : vm_counts)
    if (c < 0) throw std::invalid_argument("vm_counts entries must be >= 0");
  if (capacity_vm_count < 0) throw std::invalid_argument("capacity_vm_count must be >= 0");
  if (capacity_scenarios.empty())
    throw std::invalid_argument("capacity_scenarios must be non-empty");
  for (const auto& [lo, hi] : capacity_scenarios)
    if (!(lo > 0) || hi < lo)
      throw std::invalid_argument("capacity scenarios need 0 < low <= high");
  if (modes.empty()) throw std::invalid_argument("modes must be non-empty");
  if (seeds.empty()) throw std::invalid_argument("seeds must be non-empty");
  SolverLimits probe{time_limit_s, node_limit};
  probe.validate();
}

SolverLimits ExperimentConfig::limits_for(int vm_count) const {
  SolverLimits lim{time_limit_s, node_limit};
  auto it = node_limit_per_count.find(vm_count);
  if (it != node_limit_per_count.end()) lim.node_limit = it->second;
  return lim;
}

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw parse_error(std::string("config is not valid JSON: ") + e.what());
  }
  try {
    ExperimentConfig cfg;
    if (j.contains("architecture")) {
      const json& a = j["architecture"];
      cfg.architecture.cells = get_or(a, "cells", cfg.architecture.cells);
      cfg.architecture.racks_per_cell =
          get_or(a, "racks_per_cell", cfg.architecture.racks_per_cell);
      cfg.architecture.servers_per_rack =
          get_or(a, "servers_per_rack", cfg.architecture.servers_per_rack);
      cfg.architecture.capacity_low_mips =
          get_or(a, "capacity_low_mips", cfg.architecture.capacity_low_mips);
      cfg.architecture.capacity_high_mips =
          get_or(a, "capacity_high_mips", cfg.architecture.capacity_high_mips);
      cfg.architecture.ram_low_gb = get_or(a, "ram_low_gb", cfg.architecture.ram_low_gb);
      cfg.architecture.ram_high_gb = get_or(a, "ram_high_gb", cfg.architecture.ram_high_gb);
      cfg.architecture.server_rate_gbps =
          get_or(a, "server_rate_gbps", cfg.architecture.server_rate_gbps);
      cfg.architecture.onu_rate_gbps =
          get_or(a, "onu_rate_gbps", cfg.architecture.onu_rate_gbps);
      cfg.architecture.link_capacity_gbps =
          get_or(a, "link_capacity_gbps", cfg.architecture.link_capacity_gbps);
      cfg.architecture.seed = get_or(a, "seed", cfg.architecture.seed);
    }
    if (j.contains("power")) {
      const json& p = j["power"];
      cfg.power.p_max_w = get_or(p, "p_max_w", cfg.power.p_max_w);
      cfg.power.p_idle_w = get_or(p, "p_idle_w", cfg.power.p_idle_w);
      cfg.power.p_transceiver_w = get_or(p, "p_transceiver_w", cfg.power.p_transceiver_w);
      cfg.power.p_onu_w = get_or(p, "p_onu_w", cfg.power.p_onu_w);
      cfg.power.forwarding_fraction =
          get_or(p, "forwarding_fraction", cfg.power.forwarding_fraction);
    }
    if (j.contains("workload")) {
      const json& w = j["workload"];
      cfg.workload.cpu_low_mips = get_or(w, "cpu_low_mips", cfg.workload.cpu_low_mips);
      cfg.workload.cpu_high_mips = get_or(w, "cpu_high_mips", cfg.workload.cpu_high_mips);
      cfg.workload.ram_low_gb = get_or(w, "ram_low_gb", cfg.workload.ram_low_gb);
      cfg.workload.ram_high_gb = get_or(w, "ram_high_gb", cfg.workload.ram_high_gb);
      cfg.workload.traffic_low_gbps =
          get_or(w, "traffic_low_gbps", cfg.workload.traffic_low_gbps);
      cfg.workload.traffic_high_gbps =
          get_or(w, "traffic_high_gbps", cfg.workload.traffic_high_gbps);
    }
    if (j.contains("options")) {
      const json& o = j["options"];
      cfg.options.ingress_limit = get_or(o, "ingress_limit", cfg.options.ingress_limit);
      cfg.options.relay_request_cap =
          get_or(o, "relay_request_cap", cfg.options.relay_request_cap);
    }
    cfg.vm_counts = get_or(j, "vm_counts", cfg.vm_counts);
    cfg.capacity_vm_count = get_or(j, "capacity_vm_count", cfg.capacity_vm_count);
    if (j.contains("capacity_scenarios") && !j["capacity_scenarios"].is_null()) {
      cfg.capacity_scenarios.clear();
      for (const json& sc : j["capacity_scenarios"]) {
        if (sc.is_array() && sc.size() == 2)
          cfg.capacity_scenarios.emplace_back(sc[0].get<double>(), sc[1].get<double>());
        else if (sc.is_number())
          cfg.capacity_scenarios.emplace_back(sc.get<double>(), sc.get<double>());
        else
          throw parse_error("capacity_scenarios entries must be [low, high] or a number");
      }
    }
    if (j.contains("modes") && !j["modes"].is_null()) {
      cfg.modes.clear();
      for (const json& m : j["modes"])
        cfg.modes.push_back(objective_mode_from_string(m.get<std::string>()));
    }
    cfg.seeds = get_or(j, "seeds", cfg.seeds);
    if (j.contains("solver")) {
      const json& s = j["solver"];
      cfg.time_limit_s = get_or(s, "time_limit_s", cfg.time_limit_s);
      cfg.node_limit = get_or(s, "node_limit", cfg.node_limit);
      if (s.contains("node_limit_per_count") && !s["node_limit_per_count"].is_null())
        for (const auto& [key, value] : s["node_limit_per_count"].items())
          cfg.node_limit_per_count[static_cast<int>(parse_i64(key, "vm count key"))] =
              value.get<std::int64_t>();
    }
    cfg.validate();
    return cfg;
  } catch (const nlohmann::json::exception& e) {
    throw parse_error(std::string("config field has the wrong type: ") + e.what());
  } catch (const std::invalid_argument& e) {
    // Mode strings, validation limits: a bad config file is a parse failure
    // to the caller regardless of which layer noticed.
    throw parse_error(std::string("config rejected: ") + e.what());
  }
}

ExperimentConfig ExperimentConfig::load_file(const std::string& path) {
  return from_json_text(read_file(path));
}

std::string ExperimentConfig::to_json_text() const {
  json j;
  j["architecture"] = {{"cells", architecture.cells},
                       {"racks_per_cell", architecture.racks_per_cell},
                       {"servers_per_rack", architecture.servers_per_rack},
                       {"capacity_low_mips", architecture.capacity_low_mips},
                       {"capacity_high_mips", architecture.capacity_high_mips},
                       {"ram_low_gb", architecture.ram_low_gb},
                       {"ram_high_gb", architecture.ram_high_gb},
                       {"server_rate_gbps", architecture.server_rate_gbps},
                       {"onu_rate_gbps", architecture.onu_rate_gbps},
                       {"link_capacity_gbps", architecture.link_capacity_gbps},
                       {"seed", architecture.seed}};
  j["power"] = {{"p_max_w", power.p_max_w},
                {"p_idle_w", power.p_idle_w},
                {"p_transceiver_w", power.p_transceiver_w},
                {"p_onu_w", power.p_onu_w},
                {"forwarding_fraction", power.forwarding_fraction}};
  j["workload"] = {{"cpu_low_mips", workload.cpu_low_mips},
                   {"cpu_high_mips", workload.cpu_high_mips},
                   {"ram_low_gb", workload.ram_low_gb},
                   {"ram_high_gb", workload.ram_high_gb},
                   {"traffic_low_gbps", workload.traffic_low_gbps},
                   {"traffic_high_gbps", workload.traffic_high_gbps}};
  j["options"] = {{"ingress_limit", options.ingress_limit},
                  {"relay_request_cap", options.relay_request_cap}};
  j["vm_counts"] = vm_counts;
  j["capacity_vm_count"] = capacity_vm_count;
  json scenarios = json::array();
  for (const auto& [lo, hi] : capacity_scenarios) scenarios.push_back({lo, hi});
  j["capacity_scenarios"] = scenarios;
  json mode_names = json::array();
  for (ObjectiveMode m : modes) mode_names.push_back(to_string(m));
  j["modes"] = mode_names;
  j["seeds"] = seeds;
  json solver;
  if (std::isfinite(time_limit_s)) solver["time_limit_s"] = time_limit_s;
  else solver["time_limit_s"] = nullptr;
  solver["node_limit"] = node_limit;
  json per_count = json::object();
  for (const auto& [count, limit] : node_limit_per_count)
    per_count[std::to_string(count)] = limit;
  solver["node_limit_per_count"] = per_count;
  j["solver"] = solver;
  return j.dump(2) + "\n";
}

std::string rows_to_csv(const std::vector<RunRow>& rows) {
  std::string out = kRowsHeader;
  out += '\n';
  for (const RunRow& r : rows) {
    out += r.sweep;
    out += ',' + std::to_string(r.vm_count);
    out += ',' + fmt_double(r.capacity_low_mips);
    out += ',' + fmt_double(r.capacity_high_mips);
    out += ',' + std::to_string(r.seed);
    out += ',';
    out += to_string(r.mode);
    out += ',';
    out += status_label(r);
    if (r.feasible) {
      out += ',' + fmt_double(r.pp_w);
      out += ',' + fmt_double(r.np_w);
      out += ',' + fmt_double(r.total_w);
      out += ',' + fmt_double(r.gap);
    } else {
      out += ",,,,";
    }
    out += ',' + std::to_string(r.nodes);
    out += ',' + sanitize_note(r.note);
    out += '\n';
  }
  return out;
}

std::vector<RunRow> rows_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kRowsHeader)
    throw parse_error("rows file does not start with the expected header");
  std::vector<RunRow> rows;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 13)
      throw parse_error("expected 13 fields in a row", line_no);
    RunRow r;
    r.sweep = f[0];
    r.vm_count = static_cast<int>(parse_i64(f[1], "vm_count"));
    r.capacity_low_mips = parse_double(f[2], "capacity_low_mips");
    r.capacity_high_mips = parse_double(f[3], "capacity_high_mips");
    r.seed = parse_u64(f[4], "seed");
    r.mode = objective_mode_from_string(f[5]);
    if (f[6] == "error") {
      r.error = true;
      r.status = SolveStatus::Infeasible;
    } else if (f[6] == "optimal") {
      r.status = SolveStatus::Optimal;
    } else if (f[6] == "feasible") {
      r.status = SolveStatus::Feasible;
    } else if (f[6] == "infeasible") {
      r.status = SolveStatus::Infeasible;
    } else {
      throw parse_error("unknown status '" + f[6] + "'", line_no);
    }
    r.feasible = !r.error && r.status != SolveStatus::Infeasible;
    if (r.feasible) {
      r.pp_w = parse_double(f[7], "pp_w");
      r.np_w = parse_double(f[8], "np_w");
      r.total_w = parse_double(f[9], "total_w");
      r.gap = parse_double(f[10], "gap");
    } else if (!f[7].empty() || !f[8].empty() || !f[9].empty() || !f[10].empty()) {
      throw parse_error("power fields must be empty on non-feasible rows", line_no);
    }
    r.nodes = parse_i64(f[11], "nodes");
    r.note = f[12];
    rows.push_back(std::move(r));
  }
  return rows;
}

namespace {

struct GroupKey {
  int vm_count;
  double cap_low, cap_high;
  ObjectiveMode mode;
  bool operator==(const GroupKey& o) const {
    return vm_count == o.vm_count && cap_low == o.cap_low && cap_high == o.cap_high &&
           mode == o.mode;
  }
};

struct CellKey {
  int vm_count;
  double cap_low, cap_high;
  std::uint64_t seed;
  bool operator==(const CellKey& o) const {
    return vm_count == o.vm_count && cap_low == o.cap_low && cap_high == o.cap_high &&
           seed == o.seed;
  }
};

std::string aggregates_csv(const std::vector<RunRow>& rows) {
  std::string out =
      "sweep,vm_count,capacity_low_mips,capacity_high_mips,mode,n_runs,n_feasible,"
      "mean_pp_w,mean_np_w,mean_total_w,min_total_w,max_total_w";
  out += '\n';
  std::vector<GroupKey> order;
  for (const RunRow& r : rows) {
    const GroupKey k{r.vm_count, r.capacity_low_mips, r.capacity_high_mips, r.mode};
    if (std::find(order.begin(), order.end(), k) == order.end()) order.push_back(k);
  }
  for (const GroupKey& k : order) {
    int n_runs = 0, n_feasible = 0;
    double sum_pp = 0, sum_np = 0, sum_total = 0;
    double min_total = std::numeric_limits<double>::infinity();
    double max_total = -min_total;
    std::string sweep;
    for (const RunRow& r : rows) {
      if (!(GroupKey{r.vm_count, r.capacity_low_mips, r.capacity_high_mips, r.mode} == k))
        continue;
      sweep = r.sweep;
      ++n_runs;
      if (!r.feasible) continue;
      ++n_feasible;
      sum_pp += r.pp_w;
      sum_np += r.np_w;
      sum_total += r.total_w;
      min_total = std::min(min_total, r.total_w);
      max_total = std::max(max_total, r.total_w);
    }
    out += sweep;
    out += ',' + std::to_string(k.vm_count);
    out += ',' + fmt_double(k.cap_low);
    out += ',' + fmt_double(k.cap_high);
    out += ',';
    out += to_string(k.mode);
    out += ',' + std::to_string(n_runs);
    out += ',' + std::to_string(n_feasible);
    if (n_feasible > 0) {
      out += ',' + fmt_double(sum_pp / n_feasible);
      out += ',' + fmt_double(sum_np / n_feasible);
      out += ',' + fmt_double(sum_total / n_feasible);
      out += ',' + fmt_double(min_total);
      out += ',' + fmt_double(max_total);
    } else {
      out += ",,,,,";
    }
    out += '\n';
  }
  return out;
}

// Rows of one cell (same instance, both modes) when both solves are feasible.
struct ReductionCell {
  CellKey key;
  std::string sweep;
  double np_pp, np_both, total_pp, total_both;
  bool np_defined;  // np under plain-processing mode is positive
  double np_reduction_pct, total_reduction_pct;
};

std::vector<ReductionCell> reduction_cells(const std::vector<RunRow>& rows) {
  std::vector<CellKey> order;
  for (const RunRow& r : rows) {
    const CellKey k{r.vm_count, r.capacity_low_mips, r.capacity_high_mips, r.seed};
    if (std::find(order.begin(), order.end(), k) == order.end()) order.push_back(k);
  }
  std::vector<ReductionCell> cells;
  for (const CellKey& k : order) {
    const RunRow* pp = nullptr;
    const RunRow* both = nullptr;
    std::string sweep;
    for (const RunRow& r : rows) {
      if (!(CellKey{r.vm_count, r.capacity_low_mips, r.capacity_high_mips, r.seed} == k))
        continue;
      sweep = r.sweep;
      if (!r.feasible) continue;
      if (r.mode == ObjectiveMode::PP && !pp) pp = &r;
      if (r.mode == ObjectiveMode::PP_AND_NP && !both) both = &r;
    }
    if (!pp || !both) continue;
    ReductionCell c;
    c.key = k;
    c.sweep = sweep;
    c.np_pp = pp->np_w;
    c.np_both = both->np_w;
    c.total_pp = pp->total_w;
    c.total_both = both->total_w;
    c.np_defined = pp->np_w > 0;
    c.np_reduction_pct = c.np_defined ? (pp->np_w - both->np_w) / pp->np_w * 100.0 : 0.0;
    c.total_reduction_pct =
        pp->total_w > 0 ? (pp->total_w - both->total_w) / pp->total_w * 100.0 : 0.0;
    cells.push_back(c);
  }
  return cells;
}

std::string reductions_csv(const std::vector<ReductionCell>& cells) {
  std::string out =
      "sweep,vm_count,capacity_low_mips,capacity_high_mips,seed,np_pp_w,np_both_w,"
      "np_reduction_pct,total_pp_w,total_both_w,total_reduction_pct";
  out += '\n';
  for (const ReductionCell& c : cells) {
    out += c.sweep;
    out += ',' + std::to_string(c.key.vm_count);
    out += ',' + fmt_double(c.key.cap_low);
    out += ',' + fmt_double(c.key.cap_high);
    out += ',' + std::to_string(c.key.seed);
    out += ',' + fmt_double(c.np_pp);
    out += ',' + fmt_double(c.np_both);
    out += ',';
    if (c.np_defined) out += fmt_double(c.np_reduction_pct);
    out += ',' + fmt_double(c.total_pp);
    out += ',' + fmt_double(c.total_both);
    out += ',' + fmt_double(c.total_reduction_pct);
    out += '\n';
  }
  return out;
}

std::string summary_json(const std::vector<RunRow>& rows,
                         const std::vector<ReductionCell>& cells) {
  json j;
  j["sweep"] = rows.empty() ? "" : rows.front().sweep;
  int feasible = 0, errors = 0;
  for (const RunRow& r : rows) {
    feasible += r.feasible ? 1 : 0;
    errors += r.error ? 1 : 0;
  }
  j["row_count"] = rows.size();
  j["feasible_rows"] = feasible;
  j["infeasible_rows"] = static_cast<int>(rows.size()) - feasible - errors;
  j["error_rows"] = errors;
  j["exit_code"] = exit_code_for(rows);

  // Reduction statistics per (vm_count, capacity) group.
  struct RKey {
    int vm_count;
    double cap_low, cap_high;
    bool operator==(const RKey& o) const {
      return vm_count == o.vm_count && cap_low == o.cap_low && cap_high == o.cap_high;
    }
  };
  std::vector<RKey> order;
  for (const ReductionCell& c : cells) {
    const RKey k{c.key.vm_count, c.key.cap_low, c.key.cap_high};
    if (std::find(order.begin(), order.end(), k) == order.end()) order.push_back(k);
  }
  json reductions = json::array();
  for (const RKey& k : order) {
    int compared = 0, defined = 0, ge50 = 0;
    double sum_np = 0, sum_total = 0;
    double max_np = -std::numeric_limits<double>::infinity();
    for (const ReductionCell& c : cells) {
      if (!(RKey{c.key.vm_count, c.key.cap_low, c.key.cap_high} == k)) continue;
      ++compared;
      sum_total += c.total_reduction_pct;
      if (!c.np_defined) continue;
      ++defined;
      sum_np += c.np_reduction_pct;
      max_np = std::max(max_np, c.np_reduction_pct);
      if (c.np_reduction_pct >= 50.0) ++ge50;
    }
    json entry;
    entry["vm_count"] = k.vm_count;
    entry["capacity_low_mips"] = k.cap_low;
    entry["capacity_high_mips"] = k.cap_high;
    entry["seeds_compared"] = compared;
    if (defined > 0) {
      entry["mean_np_reduction_pct"] = sum_np / defined;
      entry["max_np_reduction_pct"] = max_np;
    } else {
      entry["mean_np_reduction_pct"] = nullptr;
      entry["max_np_reduction_pct"] = nullptr;
    }
    entry["cells_np_reduction_ge_50pct"] = ge50;
    entry["mean_total_reduction_pct"] =
        compared > 0 ? json(sum_total / compared) : json(nullptr);
    reductions.push_back(entry);
  }
  j["np_reduction"] = reductions;
  return j.dump(2) + "\n";
}

RunRow execute_run(const Topology& topo, const ExperimentConfig& cfg, const char* sweep,
                   int vm_count, std::uint64_t seed, ObjectiveMode mode,
                   double& wall_time_out) {
  RunRow row;
  row.sweep = sweep;
  row.vm_count = vm_count;
  row.capacity_low_mips = topo.spec().capacity_low_mips;
  row.capacity_high_mips = topo.spec().capacity_high_mips;
  row.seed = seed;
  row.mode = mode;
  wall_time_out = 0.0;
  try {
    const WorkloadInstance wl = WorkloadInstance::generate(vm_count, cfg.workload, seed);
    const SolveReport rep =
        solve_exact(topo, wl, mode, cfg.options, cfg.power, cfg.limits_for(vm_count));
    row.status = rep.status;
    row.nodes = rep.nodes_explored;
    row.note = rep.note;
    wall_time_out = rep.wall_time_s;
    if (rep.status != SolveStatus::Infeasible) {
      row.feasible = true;
      row.pp_w = rep.power.pp_w;
      row.np_w = rep.power.np_w;
      row.total_w = rep.power.total_w;
      row.gap = rep.status == SolveStatus::Optimal
                    ? 0.0
                    : std::max(0.0, (rep.objective_w - rep.lower_bound_w) /
                                        std::max(rep.objective_w, 1e-12));
    }
  } catch (const std::exception& e) {
    row.error = true;
    row.feasible = false;
    row.note = std::string("error: ") + e.what();
  }
  return row;
}

std::string timings_header() {
  return "sweep,vm_count,capacity_low_mips,capacity_high_mips,seed,mode,status,nodes,"
         "wall_time_s\n";
}

void append_timing(std::string& out, const RunRow& r, double wall_time_s) {
  out += r.sweep;
  out += ',' + std::to_string(r.vm_count);
  out += ',' + fmt_double(r.capacity_low_mips);
  out += ',' + fmt_double(r.capacity_high_mips);
  out += ',' + std::to_string(r.seed);
  out += ',';
  out += to_string(r.mode);
  out += ',';
  out += status_label(r);
  out += ',' + std::to_string(r.nodes);
  out += ',' + fmt_double(wall_time_s);
  out += '\n';
}

void write_sweep_outputs(const std::string& out_dir, const ExperimentConfig& cfg,
                         const std::vector<RunRow>& rows, const std::string& timings) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  const fs::path dir(out_dir);
  write_file_atomic(dir / "rows.csv", rows_to_csv(rows));
  write_file_atomic(dir / "timings.csv", timings);
  write_file_atomic(dir / "config.json", cfg.to_json_text());
  write_derived_reports(out_dir, rows);
}

}  // namespace

void write_derived_reports(const std::string& out_dir, const std::vector<RunRow>& rows) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  const fs::path dir(out_dir);
  const auto cells = reduction_cells(rows);
  write_file_atomic(dir / "aggregates.csv", aggregates_csv(rows));
  write_file_atomic(dir / "reductions.csv", reductions_csv(cells));
  write_file_atomic(dir / "summary.json", summary_json(rows, cells));
}

SweepOutcome run_vm_sweep(const ExperimentConfig& config, const std::string& out_dir) {
  config.validate();
  const Topology topo = Topology::build(config.architecture);
  SweepOutcome outcome;
  std::string timings = timings_header();
  for (int count : config.vm_counts)
    for (std::uint64_t seed : config.seeds)
      for (ObjectiveMode mode : config.modes) {
        double wall = 0;
        RunRow row = execute_run(topo, config, "vms", count, seed, mode, wall);
        append_timing(timings, row, wall);
        outcome.rows.push_back(std::move(row));
      }
  write_sweep_outputs(out_dir, config, outcome.rows, timings);
  outcome.exit_code = exit_code_for(outcome.rows);
  return outcome;
}

SweepOutcome run_capacity_sweep(const ExperimentConfig& config, const std::string& out_dir) {
  config.validate();
  SweepOutcome outcome;
  std::string timings = timings_header();
  for (const auto& [lo, hi] : config.capacity_scenarios) {
    ArchitectureSpec spec = config.architecture;
    spec.capacity_low_mips = lo;
    spec.capacity_high_mips = hi;
    const Topology topo = Topology::build(spec);
    for (std::uint64_t seed : config.seeds)
      for (ObjectiveMode mode : config.modes) {
        double wall = 0;
        RunRow row =
            execute_run(topo, config, "capacity", config.capacity_vm_count, seed, mode, wall);
        append_timing(timings, row, wall);
        outcome.rows.push_back(std::move(row));
      }
  }
  write_sweep_outputs(out_dir, config, outcome.rows, timings);
  outcome.exit_code = exit_code_for(outcome.rows);
  return outcome;
}

int reaggregate_dir(const std::string& out_dir) {
  const std::filesystem::path dir(out_dir);
  const std::vector<RunRow> rows = rows_from_csv(read_file(dir / "rows.csv"));
  write_derived_reports(out_dir, rows);
  return exit_code_for(rows);
}

}  // namespace ponplace
