#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
#include "qcad/mapper.hpp"
#include "qcad/qec.hpp"
#include "qcad/randgen.hpp"

using namespace qcad;

namespace {

RegionLayout make_layout(DatapathKind kind, int d, int m = -1) {
  return instantiate(DatapathConfig::preset(kind, d, m), TechModel::defaults(1));
}

/* two heavily-interacting pairs that partition onto separate regions */
Circuit two_pairs() {
  Circuit c;
  for (int i = 0; i < 4; ++i) c.add_qubit("q" + std::to_string(i));
  for (int rep = 0; rep < 3; ++rep) {
    c.add_gate(GateKind::Cnot, {0, 1});
    c.add_gate(GateKind::Cnot, {2, 3});
  }
  return c;
}

MappedSchedule map_onto(const Circuit& c, const RegionLayout& lay) {
  return schedule(c, lay, partition(c, lay));
}

}  // namespace

TEST_CASE("independent gates serialize in a single two-slot region") {
  Circuit one;
  one.add_qubit("a");
  one.add_gate(GateKind::H, {0});
  Circuit two;
  two.add_qubit("a");
  two.add_qubit("b");
  two.add_gate(GateKind::H, {0});
  two.add_gate(GateKind::H, {1});

  RegionLayout lay = make_layout(DatapathKind::Qla, 1);
  double m1 = map_onto(one, lay).makespan_us;
  double m2 = map_onto(two, lay).makespan_us;
  CHECK(m2 == doctest::Approx(2.0 * m1));
}

TEST_CASE("a second region restores parallelism") {
  Circuit c = two_pairs();
  /* one wide region serializes the pairs; two regions run them side by side */
  RegionLayout wide = make_layout(DatapathKind::CqlaPlus, 1, 0);
  RegionLayout split = make_layout(DatapathKind::Qla, 2, 0);
  double on_one = map_onto(c, wide).makespan_us;
  double on_two = map_onto(c, split).makespan_us;
  CHECK(on_two < on_one);
}

TEST_CASE("a cross-region gate is preceded by exactly one teleport") {
  Circuit c;
  c.add_qubit("a");
  c.add_qubit("b");
  c.add_qubit("c");
  for (int rep = 0; rep < 3; ++rep) c.add_gate(GateKind::Cnot, {0, 1});
  GateId cross = c.add_gate(GateKind::Cnot, {0, 2});

  RegionLayout lay = make_layout(DatapathKind::Qla, 2, 0);
  Assignment asg = partition(c, lay);
  REQUIRE(asg.region_of[0] != asg.region_of[2]); /* pair vs loner */
  MappedSchedule s = schedule(c, lay, asg);
  CHECK(s.teleport_count == 1);
  REQUIRE(s.relocations.size() == 1);
  const Relocation& r = s.relocations[0];
  CHECK(r.arrive_us <= s.gates[cross].start_us + 1e-9);
  CHECK(validate_schedule(s, c, lay).empty());
}

TEST_CASE("validator passes for every datapath family") {
  RandSpec spec;
  spec.gates = 120;
  spec.qubits = 10;
  spec.seed = 31;
  Circuit base = gen_random(spec);
  Circuit c = apply_placement(base, insert_corrections(base, {}));
  c = decompose_toffoli(c);
  TechModel tech = TechModel::defaults(1);
  for (DatapathKind kind : {DatapathKind::Qla, DatapathKind::Lqla,
                            DatapathKind::Cqla, DatapathKind::CqlaPlus,
                            DatapathKind::Qalypso}) {
    RegionLayout lay = instantiate(fit_datapath(kind, 10, tech), tech);
    MappedSchedule s = map_onto(c, lay);
    auto bad = validate_schedule(s, c, lay);
    if (!bad.empty()) {
      CAPTURE(datapath_name(kind));
      CAPTURE(bad[0]);
    }
    CHECK(bad.empty());
    CHECK(s.makespan_us > 0.0);
  }
}

TEST_CASE("scheduling is deterministic") {
  RandSpec spec;
  spec.gates = 200;
  spec.qubits = 12;
  spec.seed = 8;
  Circuit c = decompose_toffoli(gen_random(spec));
  RegionLayout lay = make_layout(DatapathKind::Qalypso, 2);
  MappedSchedule a = map_onto(c, lay);
  MappedSchedule b = map_onto(c, lay);
  CHECK(a.makespan_us == b.makespan_us);
  CHECK(a.teleport_count == b.teleport_count);
  REQUIRE(a.gates.size() == b.gates.size());
  for (std::size_t i = 0; i < a.gates.size(); ++i) {
    CHECK(a.gates[i].start_us == b.gates[i].start_us);
    CHECK(a.gates[i].region == b.gates[i].region);
  }
}

TEST_CASE("no memory relocations exist without memory regions") {
  RandSpec spec;
  spec.gates = 150;
  spec.qubits = 8;
  spec.seed = 17;
  Circuit c = decompose_toffoli(gen_random(spec));
  RegionLayout lay = make_layout(DatapathKind::Qla, 5, 0); /* M = 0 */
  MappedSchedule s = map_onto(c, lay);
  for (const Relocation& r : s.relocations)
    CHECK(lay.regions[r.to].type == RegionType::Data);
  CHECK(s.idle_corrections.empty());
  CHECK(validate_schedule(s, c, lay).empty());
}

TEST_CASE("qalypso schedules never stall on ancilla") {
  RandSpec spec;
  spec.gates = 180;
  spec.qubits = 14;
  spec.seed = 23;
  Circuit base = gen_random(spec);
  Circuit c =
      decompose_toffoli(apply_placement(base, insert_corrections(base, {})));
  RegionLayout lay = make_layout(DatapathKind::Qalypso, 2);
  MappedSchedule s = map_onto(c, lay);
  CHECK(s.ancilla_stall_us == 0.0);
  CHECK(validate_schedule(s, c, lay).empty());
}

TEST_CASE("fixed-ancilla schedules report their stall total") {
  RandSpec spec;
  spec.gates = 180;
  spec.qubits = 14;
  spec.seed = 23;
  Circuit base = gen_random(spec);
  Circuit c =
      decompose_toffoli(apply_placement(base, insert_corrections(base, {})));
  TechModel tech = TechModel::defaults(1);
  RegionLayout lay = instantiate(fit_datapath(DatapathKind::Qla, 14, tech), tech);
  MappedSchedule s = map_onto(c, lay);
  CHECK(s.ancilla_stall_us >= 0.0);
  CHECK(validate_schedule(s, c, lay).empty());
}

TEST_CASE("long-parked memory qubits receive periodic corrections") {
  Circuit c;
  c.add_qubit("a");
  c.add_qubit("b");
  c.add_qubit("w");
  c.add_gate(GateKind::Cnot, {0, 1});
  /* > 10^4 us of unrelated work: 250 measure gates at 50 us */
  for (int i = 0; i < 250; ++i) c.add_gate(GateKind::Measure, {2});
  c.add_gate(GateKind::Cnot, {0, 1});
  RegionLayout lay = make_layout(DatapathKind::Cqla, 1, 1);
  MappedSchedule s = map_onto(c, lay);
  /* set 1: one EC per 10^4 us of idling (gate error / idle rate) */
  bool a_corrected = false;
  for (const IdleCorrection& ic : s.idle_corrections)
    a_corrected |= ic.qubit == 0;
  CHECK(a_corrected);
  CHECK(validate_schedule(s, c, lay).empty());
}

TEST_CASE("generator sizing applies the window ceiling") {
  RegionLayout lay = make_layout(DatapathKind::Qalypso, 1);
  MappedSchedule s;
  s.zero_demand.resize(lay.size());
  s.t_demand.resize(lay.size());
  s.router_load.resize(lay.size());

  SUBCASE("single correction per window needs one generator") {
    s.zero_demand[0] = {{0.0, 2.0}};
    RegionLayout sized = size_ancilla(s, lay);
    CHECK(sized.regions[0].generators == 1);
  }
  SUBCASE("doubling windowed demand doubles the generators") {
    /* pipelined factory makes 6 blocks per 60 us window */
    for (int i = 0; i < 3; ++i) s.zero_demand[0].push_back({i * 10.0, 2.0});
    CHECK(size_ancilla(s, lay).regions[0].generators == 1);
    for (int i = 3; i < 6; ++i) s.zero_demand[0].push_back({i * 10.0, 2.0});
    CHECK(size_ancilla(s, lay).regions[0].generators == 2);
  }
  SUBCASE("idle regions get zero generators") {
    CHECK(size_ancilla(s, lay).regions[1].generators == 0);
  }
}

TEST_CASE("generator sizing rejects fixed-ancilla layouts") {
  RegionLayout lay = make_layout(DatapathKind::Qla, 1);
  MappedSchedule s;
  s.zero_demand.resize(lay.size());
  CHECK_THROWS_AS(size_ancilla(s, lay), std::invalid_argument);
}

TEST_CASE("router peaks from synthetic load series") {
  RegionLayout lay = make_layout(DatapathKind::Qla, 4, 0);
  MappedSchedule s;
  s.router_load.resize(lay.size());

  SUBCASE("no teleports means zero peaks and no extra area") {
    NetworkSizing ns = size_network(s, lay);
    for (int p : ns.peak_load) CHECK(p == 0);
    CHECK(ns.extra_router_area_mb(lay) == 0.0);
  }
  SUBCASE("two overlapping connections peak at two") {
    s.router_load[1] = {{0.0, 1}, {0.0, 1}, {61.0, -1}, {61.0, -1}};
    NetworkSizing ns = size_network(s, lay);
    CHECK(ns.peak_load[1] == 2);
    CHECK(ns.provisioned[1] == 2);
  }
  SUBCASE("serializing the same connections peaks at one") {
    s.router_load[1] = {{0.0, 1}, {61.0, -1}, {61.0, 1}, {122.0, -1}};
    NetworkSizing ns = size_network(s, lay);
    CHECK(ns.peak_load[1] == 1);
  }
  SUBCASE("aggressiveness scales provisioning but not the peak") {
    s.router_load[2] = {{0.0, 1}, {0.0, 1}, {0.0, 1}, {0.0, 1},
                        {10.0, -1}, {10.0, -1}, {10.0, -1}, {10.0, -1}};
    NetworkSizing half = size_network(s, lay, 0.5);
    CHECK(half.peak_load[2] == 4);
    CHECK(half.provisioned[2] == 2);
    CHECK_THROWS(size_network(s, lay, 0.0));
    CHECK_THROWS(size_network(s, lay, 1.5));
  }
}

TEST_CASE("used routers are provisioned to at least one unit") {
  Circuit c;
  c.add_qubit("a");
  c.add_qubit("b");
  c.add_qubit("c");
  for (int rep = 0; rep < 3; ++rep) c.add_gate(GateKind::Cnot, {0, 1});
  c.add_gate(GateKind::Cnot, {0, 2});
  RegionLayout lay = make_layout(DatapathKind::Qla, 2, 0);
  MappedSchedule s = map_onto(c, lay);
  REQUIRE(s.teleport_count == 1);
  NetworkSizing ns = size_network(s, lay, 0.1);
  bool any_used = false;
  for (std::size_t r = 0; r < lay.size(); ++r)
    if (ns.peak_load[r] > 0) {
      any_used = true;
      CHECK(ns.provisioned[r] >= 1);
    }
  CHECK(any_used);
}

TEST_CASE("deadlock reporting names the blocked time") {
  /* 3 qubits cannot fit one two-slot region */
  Circuit c;
  c.add_qubit("a");
  c.add_qubit("b");
  c.add_qubit("t");
  c.add_gate(GateKind::Toffoli, {0, 1, 2});
  Circuit d = decompose_toffoli(c);
  RegionLayout lay = make_layout(DatapathKind::Qla, 1, 0);
  CHECK_THROWS_AS(partition(d, lay), std::invalid_argument);
}
