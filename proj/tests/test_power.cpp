#include <stdexcept>

#include "doctest.h"
#include "ponplace/errors.hpp"
#include "ponplace/placement.hpp"
#include "ponplace/power.hpp"

using namespace ponplace;

TEST_CASE("server draw endpoints are exact") {
  const PowerParams p;
  // Full load: idle + transceiver + full proportional span.
  CHECK(server_power(p, true, 10800.0, 10800.0) == 302.0);
  CHECK(server_power(p, true, 6800.0, 6800.0) == 302.0);
  // Half load sits exactly halfway up the proportional span.
  CHECK(server_power(p, true, 5400.0, 10800.0) == 252.0);
  // Zero load still pays the fixed terms.
  CHECK(server_power(p, true, 0.0, 10800.0) == 202.0);
  CHECK(server_power(p, false, 0.0, 10800.0) == 0.0);
}

TEST_CASE("relay draw endpoints are exact") {
  const PowerParams p;
  const auto idle = relay_power(p, true, 0.0, 10.0);
  CHECK(idle.first == 201.0);
  CHECK(idle.second == 2.5);
  const auto full = relay_power(p, true, 10.0, 10.0);
  CHECK(full.first == 301.0);
  CHECK(full.second == 2.5);
  const auto off = relay_power(p, false, 0.0, 10.0);
  CHECK(off.first == 0.0);
  CHECK(off.second == 0.0);
}

TEST_CASE("server draw is linear and monotone in load") {
  const PowerParams p;
  const double cap = 9321.5;
  const double slope = (p.p_max_w - p.p_idle_w) / cap;
  double prev = -1.0;
  for (double load : {0.0, 123.25, 2000.0, 4660.75, 9000.0, cap}) {
    const double w = server_power(p, true, load, cap);
    CHECK(w == doctest::Approx(202.0 + slope * load).epsilon(1e-14));
    CHECK(w > prev);
    prev = w;
  }
}

TEST_CASE("power contract breaches throw") {
  const PowerParams p;
  CHECK_THROWS_AS(server_power(p, false, 1.0, 100.0), infeasible_error);
  CHECK_THROWS_AS(server_power(p, true, 101.0, 100.0), infeasible_error);
  CHECK_THROWS_AS(server_power(p, true, -1.0, 100.0), std::invalid_argument);
  CHECK_THROWS_AS(server_power(p, true, 1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(relay_power(p, false, 0.5, 10.0), infeasible_error);
  CHECK_THROWS_AS(relay_power(p, true, 10.5, 10.0), infeasible_error);
  CHECK_THROWS_AS(relay_power(p, true, -0.5, 10.0), std::invalid_argument);
  CHECK_THROWS_AS(relay_power(p, true, 1.0, 0.0), std::invalid_argument);
}

TEST_CASE("parameter validation") {
  PowerParams p;
  p.p_max_w = 100.0;
  p.p_idle_w = 200.0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = {};
  p.forwarding_fraction = 0.0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p.forwarding_fraction = 1.5;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = {};
  p.p_onu_w = -1.0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}

TEST_CASE("request budget is the inverse forwarding fraction, floored") {
  PowerParams p;
  CHECK(max_relay_requests(p) == 20);
  p.forwarding_fraction = 0.1;
  CHECK(max_relay_requests(p) == 10);
  p.forwarding_fraction = 0.3;
  CHECK(max_relay_requests(p) == 3);
  p.forwarding_fraction = 1.0;
  CHECK(max_relay_requests(p) == 1);
}

TEST_CASE("full breakdown matches hand arithmetic on a two-rack scenario") {
  ArchitectureSpec spec;
  spec.cells = 1;
  spec.racks_per_cell = 2;
  spec.servers_per_rack = 2;
  spec.capacity_low_mips = spec.capacity_high_mips = 10000.0;
  spec.ram_low_gb = spec.ram_high_gb = 32.0;
  const Topology topo = Topology::build(spec);

  std::vector<Vm> vms{{0, 4000.0, 2.0}, {1, 2500.0, 2.0}};
  // 0 -> 1 at 0.3 Gbps, 1 -> 0 at 0.2 Gbps.
  std::vector<double> traffic{0.0, 0.3, 0.2, 0.0};
  const WorkloadInstance wl = WorkloadInstance::from_parts(vms, traffic, {}, 0);

  Placement pl;
  pl.assignment = {0, 2};  // different racks, same cell
  Routing routing = route_shortest(topo, wl, pl);
  refresh_activation(topo, pl, routing);
  REQUIRE(pl.active_servers == std::vector<NodeId>{0, 2});
  REQUIRE(pl.active_relays == std::vector<NodeId>{4});

  const PowerParams p;
  const PowerBreakdown b = evaluate_power(topo, p, wl, pl, routing);
  // Servers: 202 + 100 * load / 10000 each.
  CHECK(b.per_server_w.at(0) == doctest::Approx(202.0 + 40.0).epsilon(1e-14));
  CHECK(b.per_server_w.at(2) == doctest::Approx(202.0 + 25.0).epsilon(1e-14));
  CHECK(b.per_server_w.at(1) == 0.0);
  CHECK(b.pp_w == doctest::Approx(469.0).epsilon(1e-14));
  // Relay forwards both directions: 0.5 Gbps over a 10 Gbps uplink.
  CHECK(b.per_relay_w.at(4) == doctest::Approx(201.0 + 100.0 * 0.05).epsilon(1e-14));
  CHECK(b.per_onu_w.at(4) == 2.5);
  CHECK(b.np_w == doctest::Approx(208.5).epsilon(1e-14));
  CHECK(b.total_w == b.pp_w + b.np_w);

  // Co-locating removes all fabric traffic: the relay powers off.
  Placement co;
  co.assignment = {1, 1};
  Routing co_routing = route_shortest(topo, wl, co);
  refresh_activation(topo, co, co_routing);
  CHECK(co.active_relays.empty());
  const PowerBreakdown cb = evaluate_power(topo, p, wl, co, co_routing);
  CHECK(cb.np_w == 0.0);
  CHECK(cb.pp_w == doctest::Approx(202.0 + 65.0).epsilon(1e-14));
}

TEST_CASE("breakdown propagates contract breaches") {
  ArchitectureSpec spec;
  spec.cells = 1;
  spec.racks_per_cell = 1;
  spec.servers_per_rack = 2;
  const Topology topo = Topology::build(spec);
  const WorkloadInstance wl =
      WorkloadInstance::from_parts({{0, 100.0, 1.0}}, {0.0}, {}, 0);
  Placement pl;
  pl.assignment = {0};
  // active_servers left empty: the hosting server is not marked active.
  Routing routing = route_shortest(topo, wl, pl);
  CHECK_THROWS_AS(evaluate_power(topo, {}, wl, pl, routing), infeasible_error);
}
