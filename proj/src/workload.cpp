#include "ponplace/workload.hpp"

#include <ostream>
#include <sstream>
#include <stdexcept>

#include "ponplace/errors.hpp"
#include "ponplace/rng.hpp"
#include "ponplace/text_io.hpp"

namespace ponplace {

void WorkloadRanges::validate() const {
  if (!(cpu_low_mips > 0) || !(cpu_low_mips <= cpu_high_mips))
    throw std::invalid_argument("cpu range must be positive with low <= high");
  if (!(ram_low_gb > 0) || !(ram_low_gb <= ram_high_gb))
    throw std::invalid_argument("ram range must be positive with low <= high");
  if (!(traffic_low_gbps >= 0) || !(traffic_low_gbps <= traffic_high_gbps))
    throw std::invalid_argument("traffic range must be non-negative with low <= high");
}

WorkloadInstance WorkloadInstance::generate(int n_vms, const WorkloadRanges& ranges,
                                            std::uint64_t seed) {
  if (n_vms < 1) throw std::invalid_argument("n_vms must be >= 1");
  ranges.validate();

  WorkloadInstance w;
  w.ranges_ = ranges;
  w.seed_ = seed;
  w.vms_.reserve(n_vms);
  UniformRng rng(seed);
  for (int v = 0; v < n_vms; ++v) {
    Vm vm;
    vm.id = v;
    vm.cpu_mips = rng.uniform(ranges.cpu_low_mips, ranges.cpu_high_mips);
    vm.ram_gb = rng.uniform(ranges.ram_low_gb, ranges.ram_high_gb);
    w.vms_.push_back(vm);
  }
  w.traffic_.assign(static_cast<size_t>(n_vms) * n_vms, 0.0);
  for (int v = 0; v < n_vms; ++v)
    for (int o = 0; o < n_vms; ++o)
      if (v != o)
        w.traffic_[static_cast<size_t>(v) * n_vms + o] =
            rng.uniform(ranges.traffic_low_gbps, ranges.traffic_high_gbps);
  return w;
}

WorkloadInstance WorkloadInstance::from_parts(std::vector<Vm> vms, std::vector<double> traffic,
                                              const WorkloadRanges& ranges,
                                              std::uint64_t seed) {
  const size_t n = vms.size();
  if (traffic.size() != n * n) throw std::invalid_argument("traffic matrix must be n*n");
  for (size_t v = 0; v < n; ++v) {
    if (vms[v].id != static_cast<int>(v))
      throw std::invalid_argument("vm ids must be 0..n-1 in order");
    if (traffic[v * n + v] != 0.0)
      throw std::invalid_argument("traffic diagonal must be zero");
  }
  for (double t : traffic)
    if (t < 0) throw std::invalid_argument("traffic must be non-negative");
  WorkloadInstance w;
  w.vms_ = std::move(vms);
  w.traffic_ = std::move(traffic);
  w.ranges_ = ranges;
  w.seed_ = seed;
  return w;
}

double WorkloadInstance::total_cpu() const {
  double s = 0;
  for (const Vm& vm : vms_) s += vm.cpu_mips;
  return s;
}

double WorkloadInstance::total_ram() const {
  double s = 0;
  for (const Vm& vm : vms_) s += vm.ram_gb;
  return s;
}

double WorkloadInstance::total_traffic() const {
  double s = 0;
  for (double t : traffic_) s += t;
  return s;
}

double WorkloadInstance::vm_egress(int v) const {
  double s = 0;
  for (int o = 0; o < size(); ++o) s += traffic(v, o);
  return s;
}

double WorkloadInstance::vm_ingress(int v) const {
  double s = 0;
  for (int o = 0; o < size(); ++o) s += traffic(o, v);
  return s;
}

void WorkloadInstance::save(std::ostream& out) const { out << serialize(); }

std::string WorkloadInstance::serialize() const {
  std::ostringstream out;
  out << "ponplace-workload v1\n";
  out << "n_vms " << vms_.size() << "\n";
  out << "seed " << seed_ << "\n";
  out << "cpu_range " << fmt_double(ranges_.cpu_low_mips) << " "
      << fmt_double(ranges_.cpu_high_mips) << "\n";
  out << "ram_range " << fmt_double(ranges_.ram_low_gb) << " "
      << fmt_double(ranges_.ram_high_gb) << "\n";
  out << "traffic_range " << fmt_double(ranges_.traffic_low_gbps) << " "
      << fmt_double(ranges_.traffic_high_gbps) << "\n";
  out << "vms\n";
  for (const Vm& vm : vms_)
    out << vm.id << " " << fmt_double(vm.cpu_mips) << " " << fmt_double(vm.ram_gb) << "\n";
  out << "traffic\n";
  const int n = size();
  for (int v = 0; v < n; ++v) {
    for (int o = 0; o < n; ++o) {
      if (o) out << " ";
      out << fmt_double(traffic(v, o));
    }
    out << "\n";
  }
  out << "end\n";
  return out.str();
}

std::uint64_t WorkloadInstance::hash() const { return fnv1a64(serialize()); }

bool WorkloadInstance::operator==(const WorkloadInstance& other) const {
  if (vms_.size() != other.vms_.size() || seed_ != other.seed_) return false;
  for (size_t i = 0; i < vms_.size(); ++i)
    if (vms_[i].id != other.vms_[i].id || vms_[i].cpu_mips != other.vms_[i].cpu_mips ||
        vms_[i].ram_gb != other.vms_[i].ram_gb)
      return false;
  return traffic_ == other.traffic_;
}

namespace {

struct LineReader {
  std::istream& in;
  int line_no = 0;
  std::string line;

  bool next() {
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (!line.empty()) return true;
    }
    return false;
  }

  std::vector<std::string> expect_tokens(const std::string& what) {
    if (!next()) throw parse_error("unexpected end of file, expected " + what, line_no);
    std::vector<std::string> toks;
    std::istringstream ss(line);
    std::string t;
    while (ss >> t) toks.push_back(t);
    return toks;
  }

  // Parses "key v1 v2..." lines; verifies the key.
  std::vector<std::string> expect_key(const std::string& key, size_t n_values) {
    auto toks = expect_tokens("'" + key + "'");
    if (toks.empty() || toks[0] != key)
      throw parse_error("expected '" + key + "', got '" + line + "'", line_no);
    if (toks.size() != n_values + 1)
      throw parse_error("'" + key + "' takes " + std::to_string(n_values) + " value(s)",
                        line_no);
    return toks;
  }
};

}  // namespace

WorkloadInstance WorkloadInstance::load(std::istream& in) {
  LineReader r{in, 0, {}};
  auto header = r.expect_tokens("header");
  if (header.size() != 2 || header[0] != "ponplace-workload" || header[1] != "v1")
    throw parse_error("not a ponplace-workload v1 file", r.line_no);

  auto toks = r.expect_key("n_vms", 1);
  const auto n = parse_i64(toks[1], "n_vms");
  if (n < 0 || n > 1000000) throw parse_error("n_vms out of range", r.line_no);

  WorkloadInstance w;
  toks = r.expect_key("seed", 1);
  w.seed_ = parse_u64(toks[1], "seed");
  toks = r.expect_key("cpu_range", 2);
  w.ranges_.cpu_low_mips = parse_double(toks[1], "cpu_range low");
  w.ranges_.cpu_high_mips = parse_double(toks[2], "cpu_range high");
  toks = r.expect_key("ram_range", 2);
  w.ranges_.ram_low_gb = parse_double(toks[1], "ram_range low");
  w.ranges_.ram_high_gb = parse_double(toks[2], "ram_range high");
  toks = r.expect_key("traffic_range", 2);
  w.ranges_.traffic_low_gbps = parse_double(toks[1], "traffic_range low");
  w.ranges_.traffic_high_gbps = parse_double(toks[2], "traffic_range high");
  w.ranges_.validate();

  toks = r.expect_key("vms", 0);
  w.vms_.reserve(n);
  for (std::int64_t v = 0; v < n; ++v) {
    auto row = r.expect_tokens("vm row");
    if (row.size() != 3) throw parse_error("vm rows are 'id cpu ram'", r.line_no);
    Vm vm;
    vm.id = static_cast<int>(parse_i64(row[0], "vm id"));
    if (vm.id != v) throw parse_error("vm ids must be sequential from 0", r.line_no);
    vm.cpu_mips = parse_double(row[1], "vm cpu");
    vm.ram_gb = parse_double(row[2], "vm ram");
    if (vm.cpu_mips < w.ranges_.cpu_low_mips || vm.cpu_mips > w.ranges_.cpu_high_mips)
      throw parse_error("vm " + std::to_string(v) + " cpu outside declared range", r.line_no);
    if (vm.ram_gb < w.ranges_.ram_low_gb || vm.ram_gb > w.ranges_.ram_high_gb)
      throw parse_error("vm " + std::to_string(v) + " ram outside declared range", r.line_no);
    w.vms_.push_back(vm);
  }

  toks = r.expect_key("traffic", 0);
  w.traffic_.assign(static_cast<size_t>(n) * n, 0.0);
  for (std::int64_t v = 0; v < n; ++v) {
    auto row = r.expect_tokens("traffic row");
    if (row.size() != static_cast<size_t>(n))
      throw parse_error("traffic row " + std::to_string(v) + " must have " +
                            std::to_string(n) + " entries",
                        r.line_no);
    for (std::int64_t o = 0; o < n; ++o) {
      const double t = parse_double(row[o], "traffic entry");
      if (v == o) {
        if (t != 0.0)
          throw parse_error("traffic diagonal must be zero at vm " + std::to_string(v),
                            r.line_no);
      } else if (t < w.ranges_.traffic_low_gbps || t > w.ranges_.traffic_high_gbps) {
        throw parse_error("traffic[" + std::to_string(v) + "][" + std::to_string(o) +
                              "] outside declared range",
                          r.line_no);
      }
      w.traffic_[static_cast<size_t>(v) * n + o] = t;
    }
  }
  toks = r.expect_key("end", 0);
  return w;
}

}  // namespace ponplace
