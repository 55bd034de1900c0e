#include "ponplace/topology.hpp"

#include <algorithm>
#include <deque>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "ponplace/rng.hpp"
#include "ponplace/text_io.hpp"

namespace ponplace {

const char* to_string(NodeKind k) {
  switch (k) {
    case NodeKind::HostingServer: return "hosting";
    case NodeKind::RelayServer: return "relay";
    case NodeKind::FabricNode: return "fabric";
  }
  return "?";
}

const char* to_string(LinkMedium m) {
  switch (m) {
    case LinkMedium::Backplane: return "backplane";
    case LinkMedium::IntraCellWavelength: return "intra_cell";
    case LinkMedium::InterCellWavelength: return "inter_cell";
  }
  return "?";
}

const char* to_string(CommClass c) {
  switch (c) {
    case CommClass::SameServer: return "same_server";
    case CommClass::IntraRack: return "intra_rack";
    case CommClass::IntraCell: return "intra_cell";
    case CommClass::InterCell: return "inter_cell";
  }
  return "?";
}

void ArchitectureSpec::validate() const {
  if (cells < 1) throw std::invalid_argument("cells must be >= 1");
  if (racks_per_cell < 1) throw std::invalid_argument("racks_per_cell must be >= 1");
  if (servers_per_rack < 1) throw std::invalid_argument("servers_per_rack must be >= 1");
  if (!(capacity_low_mips <= capacity_high_mips))
    throw std::invalid_argument("capacity range must have low <= high");
  if (!(ram_low_gb <= ram_high_gb))
    throw std::invalid_argument("ram range must have low <= high");
  if (!(capacity_low_mips > 0)) throw std::invalid_argument("capacity must be > 0");
  if (!(ram_low_gb > 0)) throw std::invalid_argument("ram must be > 0");
  if (!(server_rate_gbps > 0)) throw std::invalid_argument("server_rate must be > 0");
  if (!(onu_rate_gbps > 0)) throw std::invalid_argument("onu_rate must be > 0");
  if (!(link_capacity_gbps > 0)) throw std::invalid_argument("link_capacity must be > 0");
}

Topology Topology::build(const ArchitectureSpec& spec) {
  spec.validate();
  Topology t;
  t.spec_ = spec;
  t.n_hosting_ = spec.n_hosting();

  const int n_nodes = t.n_hosting_ + spec.cells;
  t.nodes_.reserve(n_nodes);

  // Resource draws happen in node-id order: capacity then ram per server.
  UniformRng rng(spec.seed);
  for (int c = 0; c < spec.cells; ++c) {
    for (int r = 0; r < spec.racks_per_cell; ++r) {
      for (int k = 0; k < spec.servers_per_rack; ++k) {
        Node n;
        n.id = static_cast<NodeId>(t.nodes_.size());
        n.kind = NodeKind::HostingServer;
        n.cell = c;
        n.rack = r;
        n.cpu_capacity_mips = rng.uniform(spec.capacity_low_mips, spec.capacity_high_mips);
        n.ram_capacity_gb = rng.uniform(spec.ram_low_gb, spec.ram_high_gb);
        n.name = "c" + std::to_string(c) + ".r" + std::to_string(r) + ".h" + std::to_string(k);
        t.nodes_.push_back(std::move(n));
      }
    }
  }
  for (int c = 0; c < spec.cells; ++c) {
    Node n;
    n.id = static_cast<NodeId>(t.nodes_.size());
    n.kind = NodeKind::RelayServer;
    n.cell = c;
    n.rack = -1;
    n.name = "c" + std::to_string(c) + ".relay";
    t.nodes_.push_back(std::move(n));
  }

  auto add_pair = [&](NodeId a, NodeId b, LinkMedium m) {
    t.links_.push_back({a, b, spec.link_capacity_gbps, m});
    t.links_.push_back({b, a, spec.link_capacity_gbps, m});
  };

  // Canonical link order: rack backplanes, then server<->relay pairs, then the
  // relay full mesh. Within each family, ascending (cell, rack, slot) order.
  auto server_id = [&](int c, int r, int k) {
    return static_cast<NodeId>((c * spec.racks_per_cell + r) * spec.servers_per_rack + k);
  };
  for (int c = 0; c < spec.cells; ++c)
    for (int r = 0; r < spec.racks_per_cell; ++r)
      for (int i = 0; i < spec.servers_per_rack; ++i)
        for (int j = i + 1; j < spec.servers_per_rack; ++j)
          add_pair(server_id(c, r, i), server_id(c, r, j), LinkMedium::Backplane);
  for (int c = 0; c < spec.cells; ++c)
    for (int r = 0; r < spec.racks_per_cell; ++r)
      for (int k = 0; k < spec.servers_per_rack; ++k)
        add_pair(server_id(c, r, k), t.relay_of_cell_id(c), LinkMedium::IntraCellWavelength);
  for (int ci = 0; ci < spec.cells; ++ci)
    for (int cj = ci + 1; cj < spec.cells; ++cj)
      add_pair(t.relay_of_cell_id(ci), t.relay_of_cell_id(cj), LinkMedium::InterCellWavelength);

  t.adjacency_.assign(n_nodes, {});
  t.link_lookup_.assign(static_cast<size_t>(n_nodes) * n_nodes, -1);
  for (size_t li = 0; li < t.links_.size(); ++li) {
    const Link& l = t.links_[li];
    t.adjacency_[l.from].push_back(l.to);
    t.link_lookup_[static_cast<size_t>(l.from) * n_nodes + l.to] = static_cast<int>(li);
  }
  for (auto& adj : t.adjacency_) std::sort(adj.begin(), adj.end());

  // All-pairs hop counts by BFS from each node (the graph is small and static).
  t.dist_.assign(n_nodes, std::vector<int>(n_nodes, -1));
  for (int s = 0; s < n_nodes; ++s) {
    auto& dist = t.dist_[s];
    dist[s] = 0;
    std::deque<NodeId> queue{static_cast<NodeId>(s)};
    while (!queue.empty()) {
      NodeId cur = queue.front();
      queue.pop_front();
      for (NodeId nb : t.adjacency_[cur]) {
        if (dist[nb] < 0) {
          dist[nb] = dist[cur] + 1;
          queue.push_back(nb);
        }
      }
    }
  }

  t.routes_.resize(static_cast<size_t>(t.n_hosting_) * t.n_hosting_);
  for (NodeId s = 0; s < t.n_hosting_; ++s) {
    for (NodeId d = 0; d < t.n_hosting_; ++d) {
      Route route;
      route.comm_class = t.classify_pair(s, d);
      if (s != d) {
        route.links = t.shortest_path(s, d);
        for (int li : route.links) {
          NodeId from = t.links_[li].from;
          if (t.is_relay(from)) route.relays.push_back(from);
        }
      }
      t.routes_[static_cast<size_t>(s) * t.n_hosting_ + d] = std::move(route);
    }
  }
  return t;
}

NodeId Topology::relay_of_cell_id(int cell) const {
  return static_cast<NodeId>(n_hosting_ + cell);
}

NodeId Topology::relay_of_cell(int cell) const {
  if (cell < 0 || cell >= spec_.cells) throw std::out_of_range("cell out of range");
  return relay_of_cell_id(cell);
}

void Topology::check_node(NodeId id) const {
  if (id < 0 || static_cast<size_t>(id) >= nodes_.size())
    throw std::out_of_range("unknown node id " + std::to_string(id));
}

const std::vector<NodeId>& Topology::neighbors(NodeId id) const {
  check_node(id);
  return adjacency_[id];
}

int Topology::link_index(NodeId from, NodeId to) const {
  check_node(from);
  check_node(to);
  return link_lookup_[static_cast<size_t>(from) * nodes_.size() + to];
}

CommClass Topology::classify_pair(NodeId s, NodeId d) const {
  check_node(s);
  check_node(d);
  const Node& a = nodes_[s];
  const Node& b = nodes_[d];
  if (a.kind != NodeKind::HostingServer || b.kind != NodeKind::HostingServer)
    throw std::invalid_argument("classify_pair requires hosting servers");
  if (s == d) return CommClass::SameServer;
  if (a.cell != b.cell) return CommClass::InterCell;
  if (a.rack != b.rack) return CommClass::IntraCell;
  return CommClass::IntraRack;
}

std::vector<int> Topology::shortest_path(NodeId s, NodeId d) const {
  check_node(s);
  check_node(d);
  std::vector<int> path;
  if (s == d) return path;
  if (dist_[s][d] < 0) throw std::runtime_error("nodes are not connected");
  // Greedy walk toward d, always taking the smallest-id neighbor that still
  // lies on a minimal-hop path; this yields the lexicographically smallest
  // node sequence among all minimal-hop paths.
  NodeId cur = s;
  while (cur != d) {
    for (NodeId nb : adjacency_[cur]) {
      if (dist_[nb][d] == dist_[cur][d] - 1) {
        path.push_back(link_index(cur, nb));
        cur = nb;
        break;
      }
    }
  }
  return path;
}

const Route& Topology::route(NodeId s, NodeId d) const {
  if (!is_hosting(s) || !is_hosting(d))
    throw std::invalid_argument("route requires hosting servers");
  return routes_[static_cast<size_t>(s) * n_hosting_ + d];
}

std::string Topology::serialize() const {
  std::ostringstream out;
  out << "ponplace-topology v1\n";
  out << "cells " << spec_.cells << "\n";
  out << "racks_per_cell " << spec_.racks_per_cell << "\n";
  out << "servers_per_rack " << spec_.servers_per_rack << "\n";
  out << "capacity_range " << fmt_double(spec_.capacity_low_mips) << " "
      << fmt_double(spec_.capacity_high_mips) << "\n";
  out << "ram_range " << fmt_double(spec_.ram_low_gb) << " " << fmt_double(spec_.ram_high_gb)
      << "\n";
  out << "server_rate " << fmt_double(spec_.server_rate_gbps) << "\n";
  out << "onu_rate " << fmt_double(spec_.onu_rate_gbps) << "\n";
  out << "link_capacity " << fmt_double(spec_.link_capacity_gbps) << "\n";
  out << "seed " << spec_.seed << "\n";
  out << "nodes " << nodes_.size() << "\n";
  for (const Node& n : nodes_) {
    out << n.id << " " << to_string(n.kind) << " " << n.cell << " ";
    if (n.rack >= 0)
      out << n.rack;
    else
      out << "-";
    out << " " << n.name << " " << fmt_double(n.cpu_capacity_mips) << " "
        << fmt_double(n.ram_capacity_gb) << "\n";
  }
  out << "links " << links_.size() << "\n";
  for (const Link& l : links_)
    out << l.from << " " << l.to << " " << fmt_double(l.capacity_gbps) << " "
        << to_string(l.medium) << "\n";
  out << "end\n";
  return out.str();
}

void Topology::save(std::ostream& out) const { out << serialize(); }

std::uint64_t Topology::hash() const { return fnv1a64(serialize()); }

}  // namespace ponplace
