#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "qcad/tech.hpp"

using namespace qcad;

TEST_CASE("error set 1 is strictly gentler than set 2 per row") {
  ErrorSet s1 = ErrorSet::set1();
  ErrorSet s2 = ErrorSet::set2();
  CHECK(s1.one_qubit.p_fail < s2.one_qubit.p_fail);
  CHECK(s1.two_qubit.p_fail < s2.two_qubit.p_fail);
  CHECK(s1.measure.p_fail < s2.measure.p_fail);
  CHECK(s1.prep.p_fail < s2.prep.p_fail);
  CHECK(s1.move_straight.p_fail < s2.move_straight.p_fail);
  CHECK(s1.move_turn.p_fail < s2.move_turn.p_fail);
  CHECK(s1.idle_rate_per_us < s2.idle_rate_per_us);
}

TEST_CASE("published physics constants") {
  ErrorSet s1 = ErrorSet::set1();
  CHECK(s1.one_qubit.p_fail == 1e-6);
  CHECK(s1.move_straight.p_fail == 1e-8);
  CHECK(s1.idle_rate_per_us == 1e-10);
  CHECK(s1.one_qubit.latency_us == 1.0);
  CHECK(s1.two_qubit.latency_us == 10.0);
  CHECK(s1.measure.latency_us == 50.0);
  CHECK(s1.prep.latency_us == 51.0);
  CHECK(s1.move_straight.latency_us == 1.0);
  CHECK(s1.move_turn.latency_us == 10.0);

  ErrorSet s2 = ErrorSet::set2();
  CHECK(s2.one_qubit.p_fail == 1e-4);
  CHECK(s2.move_straight.p_fail == 1e-6);
  CHECK(s2.idle_rate_per_us == 1e-8);
}

TEST_CASE("purify fixed point and frozen round values") {
  CHECK(purify(1.0, 1) == 1.0);
  CHECK(purify(1.0, 7) == 1.0);
  /* F=0.9, 1 round: 0.81/(0.81+0.01) */
  CHECK(purify(0.9, 1) == doctest::Approx(0.98780).epsilon(1e-4));
  /* F=0.6, 2 rounds */
  CHECK(purify(0.6, 2) == doctest::Approx(0.835052).epsilon(1e-5));
  CHECK_THROWS(purify(0.5, 1));
  CHECK_THROWS(purify(0.3, 1));
}

TEST_CASE("purify is monotone in rounds and bounded by 1") {
  double prev = 0.7;
  for (int r = 1; r <= 6; ++r) {
    double cur = purify(0.7, r);
    CHECK(cur > prev);
    CHECK(cur <= 1.0);
    prev = cur;
  }
}

TEST_CASE("channel error examples") {
  ErrorSet s1 = ErrorSet::set1();
  SUBCASE("null channel") {
    ChannelResult r = channel_errors(0, 0, 0.0, s1);
    CHECK(r.probability == 0.0);
    CHECK(r.latency_us == 0.0);
  }
  SUBCASE("10 straights 2 turns under set 1") {
    ChannelResult r = channel_errors(10, 2, 0.0, s1);
    CHECK(r.probability == doctest::Approx(1.2e-7).epsilon(1e-3));
    CHECK(r.latency_us == doctest::Approx(30.0));
  }
  SUBCASE("single straight under set 2") {
    ChannelResult r = channel_errors(1, 0, 0.0, ErrorSet::set2());
    CHECK(r.probability == doctest::Approx(1e-6).epsilon(1e-6));
    CHECK(r.latency_us == doctest::Approx(1.0));
  }
}

TEST_CASE("channel errors compose multiplicatively") {
  ErrorSet s2 = ErrorSet::set2();
  ChannelResult whole = channel_errors(14, 5, 8.0, s2);
  ChannelResult a = channel_errors(6, 2, 3.0, s2);
  ChannelResult b = channel_errors(8, 3, 5.0, s2);
  double composed = 1.0 - (1.0 - a.probability) * (1.0 - b.probability);
  CHECK(whole.probability == doctest::Approx(composed).epsilon(1e-12));
  CHECK(whole.latency_us ==
        doctest::Approx(a.latency_us + b.latency_us).epsilon(1e-12));
}

TEST_CASE("transversal expansion counts") {
  GateCostTable t = GateCostTable::steane_defaults();
  CHECK(t.cost(GateKind::Cnot).two_qubit == 7);
  CHECK(t.cost(GateKind::Cnot).total() == 7);
  CHECK(t.cost(GateKind::X).one_qubit == 7);
  CHECK(t.cost(GateKind::H).one_qubit == 7);
  CHECK(t.cost(GateKind::PrepZ).prep == 7);
  CHECK(t.cost(GateKind::Measure).measure == 7);
}

TEST_CASE("correction bundle totals the calibrated budget") {
  GateCostTable t = GateCostTable::steane_defaults();
  /* data-side interactions with 2 zero blocks plus factory-side ops */
  CHECK(t.correction_zero_blocks == 2);
  CHECK(t.correction_total_ops() == doctest::Approx(3032).epsilon(0.01));
}

TEST_CASE("logical durations from physical latencies") {
  GateCostTable t = GateCostTable::steane_defaults();
  ErrorSet s1 = ErrorSet::set1();
  CHECK(t.logical_duration_us(GateKind::X, s1) == doctest::Approx(1.0));
  CHECK(t.logical_duration_us(GateKind::Cnot, s1) == doctest::Approx(10.0));
  CHECK(t.logical_duration_us(GateKind::Correct, s1) ==
        doctest::Approx(120.0));
  CHECK(t.logical_duration_us(GateKind::T, s1) == doctest::Approx(61.0));
  CHECK(t.teleport_duration_us(s1) == doctest::Approx(61.0));
  CHECK(t.average_gate_bundle_us(s1) == doctest::Approx(5.5));
}

TEST_CASE("tech overrides apply and reject unknown keys") {
  TechModel t = TechModel::defaults(1);
  t.apply_overrides("error.one_qubit.p = 0.25\nrouter.base_area_mb = 60\n"
                    "# comment line\n\n");
  CHECK(t.errors.one_qubit.p_fail == 0.25);
  CHECK(t.router.base_area_mb == 60.0);
  CHECK_THROWS(t.apply_overrides("no.such.key = 1\n"));
  CHECK_THROWS(t.apply_overrides("error.one_qubit.p 0.25\n"));
}

TEST_CASE("idle correction interval from rate arithmetic") {
  TechModel t = TechModel::defaults(1);
  /* gate error 1e-6 over idle rate 1e-10/us -> 1e4 us between ECs */
  CHECK(t.idle_correction_interval_us() == doctest::Approx(1e4));
}

TEST_CASE("area conversion uses the macroblock pitch") {
  TechModel t = TechModel::defaults(1);
  /* 90 um pitch: 1 mb = 0.0081 mm^2 */
  CHECK(t.area_mm2(1000.0) == doctest::Approx(8.1));
}

TEST_CASE("ancilla factory presets") {
  AncillaFactory basic = AncillaFactory::make(FactoryKind::QlaBasic);
  AncillaFactory pipe = AncillaFactory::make(FactoryKind::QalypsoPipelined);
  CHECK_FALSE(basic.pipelined);
  CHECK(pipe.pipelined);
  CHECK(pipe.throughput_blocks_per_us >= 1.0 / pipe.latency_us);
  ErrorSet s1 = ErrorSet::set1();
  CHECK(basic.output_infidelity(s1) > 0.0);
}
