#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <numeric>

#include "doctest.h"
#include "qcad/mapper.hpp"
#include "qcad/partition.hpp"
#include "qcad/randgen.hpp"

using namespace qcad;

namespace {

Circuit two_cliques() {
  Circuit c;
  for (int i = 0; i < 8; ++i) c.add_qubit("q" + std::to_string(i));
  auto clique = [&c](int base) {
    for (int i = 0; i < 4; ++i)
      for (int j = i + 1; j < 4; ++j)
        c.add_gate(GateKind::Cnot, {QubitId(base + i), QubitId(base + j)});
  };
  clique(0);
  clique(4);
  return c;
}

}  // namespace

TEST_CASE("interaction graph weights count shared two-qubit ops") {
  Circuit c;
  QubitId a = c.add_qubit("a");
  QubitId b = c.add_qubit("b");
  QubitId d = c.add_qubit("d");
  c.add_gate(GateKind::Cnot, {a, b});
  c.add_gate(GateKind::Cnot, {a, b});
  c.add_gate(GateKind::Cnot, {b, d});
  c.add_gate(GateKind::H, {a}); /* 1-qubit ops add no edges */
  InteractionGraph g = InteractionGraph::from_circuit(c);
  CHECK(g.n == 3);
  CHECK(g.total_weight() == doctest::Approx(3.0));
}

TEST_CASE("bisection of two cliques finds the zero cut") {
  InteractionGraph g = InteractionGraph::from_circuit(two_cliques());
  std::vector<int> verts(8);
  std::iota(verts.begin(), verts.end(), 0);
  std::vector<int> side = fm_bisect(g, verts, 4);
  CHECK(cut_weight(g, verts, side) == doctest::Approx(0.0));
}

TEST_CASE("partition of two cliques onto two regions has zero cut") {
  DatapathConfig cfg = DatapathConfig::preset(DatapathKind::Cqla, 2, 0);
  RegionLayout lay = instantiate(cfg, TechModel::defaults(1));
  Assignment asg = partition(two_cliques(), lay);
  CHECK(asg.cut_weight == 0);
  /* each clique lands whole in one region */
  for (int i = 1; i < 4; ++i) CHECK(asg.region_of[i] == asg.region_of[0]);
  for (int i = 5; i < 8; ++i) CHECK(asg.region_of[i] == asg.region_of[4]);
  CHECK(asg.region_of[0] != asg.region_of[4]);
}

TEST_CASE("single region takes every qubit") {
  DatapathConfig cfg = DatapathConfig::preset(DatapathKind::Qalypso, 1, 0);
  RegionLayout lay = instantiate(cfg, TechModel::defaults(1));
  RandSpec spec;
  spec.gates = 60;
  spec.qubits = 8;
  spec.seed = 6;
  Assignment asg = partition(gen_random(spec), lay);
  for (int r : asg.region_of) CHECK(r == 0);
  CHECK(asg.cut_weight == 0);
}

TEST_CASE("insufficient capacity is rejected") {
  DatapathConfig cfg = DatapathConfig::preset(DatapathKind::Qla, 1, 0);
  RegionLayout lay = instantiate(cfg, TechModel::defaults(1)); /* 2 slots */
  RandSpec spec;
  spec.gates = 10;
  spec.qubits = 5;
  spec.seed = 1;
  CHECK_THROWS_AS(partition(gen_random(spec), lay), std::invalid_argument);
}

TEST_CASE("high-rent circuits cut more than low-rent ones") {
  TechModel tech = TechModel::defaults(1);
  DatapathConfig cfg = DatapathConfig::preset(DatapathKind::Cqla, 4, 0);
  RegionLayout lay = instantiate(cfg, tech);
  std::size_t hi_wins = 0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    RandSpec hi, lo;
    hi.gates = lo.gates = 800;
    hi.qubits = lo.qubits = 96;
    hi.seed = lo.seed = seed;
    hi.rent = 0.9;
    lo.rent = 0.5;
    Assignment ah = partition(gen_random(hi), lay);
    Assignment al = partition(gen_random(lo), lay);
    if (ah.cut_weight >= al.cut_weight) ++hi_wins;
  }
  CHECK(hi_wins >= 4);
}

TEST_CASE("partition is deterministic") {
  DatapathConfig cfg = DatapathConfig::preset(DatapathKind::CqlaPlus, 2, 1);
  RegionLayout lay = instantiate(cfg, TechModel::defaults(1));
  RandSpec spec;
  spec.gates = 500;
  spec.qubits = 48;
  spec.seed = 13;
  Circuit c = gen_random(spec);
  Assignment a = partition(c, lay);
  Assignment b = partition(c, lay);
  CHECK(a.region_of == b.region_of);
  CHECK(a.cut_weight == b.cut_weight);
}

TEST_CASE("external weight of one clique is zero, of a half-clique not") {
  InteractionGraph g = InteractionGraph::from_circuit(two_cliques());
  std::vector<int> first_clique = {0, 1, 2, 3};
  CHECK(external_weight(g, first_clique) == doctest::Approx(0.0));
  std::vector<int> straddle = {0, 1, 4, 5};
  CHECK(external_weight(g, straddle) > 0.0);
}
