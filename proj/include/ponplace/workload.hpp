#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace ponplace {

struct Vm {
  int id = -1;
  double cpu_mips = 0;
  double ram_gb = 0;
};

// Sampling ranges for generated instances. Defaults are the reference set:
// VM demand 1.6k-10k MIPS and 1.7-2.7 GB, per-pair traffic 0.1-2.7 Gbps.
struct WorkloadRanges {
  double cpu_low_mips = 1600.0;
  double cpu_high_mips = 10000.0;
  double ram_low_gb = 1.7;
  double ram_high_gb = 2.7;
  double traffic_low_gbps = 0.1;
  double traffic_high_gbps = 2.7;

  void validate() const;  // throws std::invalid_argument
};

// A VM set plus its directed traffic matrix. traffic(v, o) is the demand from
// v to o in Gbps; the diagonal is zero and the matrix is deliberately NOT
// symmetric -- consumers must not symmetrize it.
class WorkloadInstance {
 public:
  WorkloadInstance() = default;

  // Draw order (one stream seeded with `seed`): per VM in id order cpu then
  // ram, then traffic row-major skipping the diagonal. Documented so files can
  // be regenerated independently.
  static WorkloadInstance generate(int n_vms, const WorkloadRanges& ranges,
                                   std::uint64_t seed);

  // Hand-built instances for tests and synthetic cases. Traffic is row-major
  // n*n with a zero diagonal.
  static WorkloadInstance from_parts(std::vector<Vm> vms, std::vector<double> traffic,
                                     const WorkloadRanges& ranges, std::uint64_t seed);

  static WorkloadInstance load(std::istream& in);  // throws parse_error

  int size() const { return static_cast<int>(vms_.size()); }
  const std::vector<Vm>& vms() const { return vms_; }
  const WorkloadRanges& ranges() const { return ranges_; }
  std::uint64_t seed() const { return seed_; }

  double traffic(int v, int o) const {
    return traffic_[static_cast<size_t>(v) * vms_.size() + o];
  }
  const std::vector<double>& traffic_matrix() const { return traffic_; }

  double total_cpu() const;
  double total_ram() const;
  double total_traffic() const;
  // Total demand leaving / entering one VM.
  double vm_egress(int v) const;
  double vm_ingress(int v) const;

  void save(std::ostream& out) const;
  std::string serialize() const;
  std::uint64_t hash() const;

  bool operator==(const WorkloadInstance& other) const;

 private:
  std::vector<Vm> vms_;
  std::vector<double> traffic_;
  WorkloadRanges ranges_;
  std::uint64_t seed_ = 0;
};

}  // namespace ponplace
