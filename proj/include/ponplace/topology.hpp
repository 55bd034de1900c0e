#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace ponplace {

// Node index into Topology::nodes(). Hosting servers occupy ids
// 0 .. n_hosting-1 (cell-major, then rack, then slot); relays follow,
// one per cell. Lexicographic comparisons on id sequences are the
// deterministic tie-break used throughout.
using NodeId = std::int32_t;

enum class NodeKind { HostingServer, RelayServer, FabricNode };
enum class LinkMedium { Backplane, IntraCellWavelength, InterCellWavelength };
enum class CommClass { SameServer, IntraRack, IntraCell, InterCell };

const char* to_string(NodeKind k);
const char* to_string(LinkMedium m);
const char* to_string(CommClass c);

// Shape and line rates of the fabric plus the seeded per-server resource
// draws. Defaults are the reference parameter set used across the project:
// 4 cells x 4 racks x 2 servers, capacities 6.8k-10.8k MIPS, RAM 8-50 GB,
// 1 Gbps server rate, 10 Gbps relay uplink, 140 Gbps fabric links.
struct ArchitectureSpec {
  int cells = 4;
  int racks_per_cell = 4;
  int servers_per_rack = 2;
  double capacity_low_mips = 6800.0;
  double capacity_high_mips = 10800.0;
  double ram_low_gb = 8.0;
  double ram_high_gb = 50.0;
  double server_rate_gbps = 1.0;
  double onu_rate_gbps = 10.0;
  double link_capacity_gbps = 140.0;
  std::uint64_t seed = 1;

  int n_hosting() const { return cells * racks_per_cell * servers_per_rack; }
  void validate() const;  // throws std::invalid_argument
};

struct Node {
  NodeId id = -1;
  NodeKind kind = NodeKind::HostingServer;
  int cell = -1;
  int rack = -1;  // -1 for relays
  double cpu_capacity_mips = 0;  // hosting servers only
  double ram_capacity_gb = 0;    // hosting servers only
  std::string name;
};

// Directed link. Every physical connection appears twice, once per direction,
// with equal capacity.
struct Link {
  NodeId from = -1;
  NodeId to = -1;
  double capacity_gbps = 0;
  LinkMedium medium = LinkMedium::Backplane;
};

// Precomputed minimal-hop route between two hosting servers: the ordered link
// indices plus the relays the route departs from (at most two).
struct Route {
  std::vector<int> links;
  std::vector<NodeId> relays;
  CommClass comm_class = CommClass::SameServer;
};

class Topology {
 public:
  static Topology build(const ArchitectureSpec& spec);

  const ArchitectureSpec& spec() const { return spec_; }
  const std::vector<Node>& nodes() const { return nodes_; }
  const std::vector<Link>& links() const { return links_; }
  int n_hosting() const { return n_hosting_; }
  int n_relays() const { return spec_.cells; }
  NodeId relay_of_cell(int cell) const;
  // Hosting servers are ids [0, n_hosting); relays are [n_hosting, n_hosting+cells).
  bool is_hosting(NodeId id) const { return id >= 0 && id < n_hosting_; }
  bool is_relay(NodeId id) const {
    return id >= n_hosting_ && id < n_hosting_ + n_relays();
  }

  // Neighbor ids, ascending; same set for in- and out-edges (links are paired).
  const std::vector<NodeId>& neighbors(NodeId id) const;
  int link_index(NodeId from, NodeId to) const;  // -1 when absent

  CommClass classify_pair(NodeId s, NodeId d) const;

  // Minimal-hop path from s to d as an ordered link list. Among equal-hop
  // paths the one with the lexicographically smallest node-id sequence is
  // returned. s == d yields an empty path.
  std::vector<int> shortest_path(NodeId s, NodeId d) const;

  // Cached variant for hosting->hosting pairs (the router's hot path).
  const Route& route(NodeId s, NodeId d) const;

  std::string serialize() const;
  void save(std::ostream& out) const;
  std::uint64_t hash() const;

 private:
  Topology() = default;
  void check_node(NodeId id) const;
  NodeId relay_of_cell_id(int cell) const;  // unchecked

  ArchitectureSpec spec_;
  int n_hosting_ = 0;
  std::vector<Node> nodes_;
  std::vector<Link> links_;
  std::vector<std::vector<NodeId>> adjacency_;
  std::vector<int> link_lookup_;       // dense from*N+to -> link index
  std::vector<std::vector<int>> dist_;  // hop counts, all node pairs
  std::vector<Route> routes_;          // hosting pairs, s*n_hosting+d
};

}  // namespace ponplace
