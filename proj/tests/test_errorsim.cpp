#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "qcad/errorsim.hpp"
#include "qcad/qec.hpp"
#include "qcad/randgen.hpp"
#include "qcad/tech.hpp"

using namespace qcad;

namespace {

RegionLayout layout_for(const Circuit& c, DatapathKind kind, int error_set) {
  TechModel tech = TechModel::defaults(error_set);
  return instantiate(fit_datapath(kind, c.qubits.size(), tech), tech);
}

ErrorTrace trace_of(const Circuit& c, const RegionLayout& lay) {
  Assignment asg = partition(c, lay);
  MappedSchedule s = schedule(c, lay, asg);
  return build_error_trace(c, s, lay);
}

}  // namespace

TEST_CASE("empty trace always succeeds") {
  ErrorTrace t;
  t.num_qubits = 1;
  McResult r = mc_run(t, 5000, 1);
  CHECK(r.p_success == 1.0);
  CHECK(r.successes == 5000);
}

TEST_CASE("ten one-percent events match the binomial oracle") {
  ErrorTrace t;
  t.num_qubits = 1;
  t.add_event({0}, 0.01, 10);
  const std::uint64_t n = 100000;
  McResult r = mc_run(t, n, 42);
  /* fail = at least 2 of 10 fire: P = (1-p)^10 + 10 p (1-p)^9 */
  const double want = std::pow(0.99, 10) + 10 * 0.01 * std::pow(0.99, 9);
  CHECK(want == doctest::Approx(0.995734).epsilon(1e-4));
  const double sigma = std::sqrt(want * (1.0 - want) / double(n));
  CHECK(std::abs(r.p_success - want) < 3.0 * sigma);
}

TEST_CASE("thirty binomial parameterizations stay within three sigma") {
  const double probs[] = {0.001, 0.003, 0.01, 0.02, 0.05};
  const int counts[] = {4, 10, 25, 60, 150, 400};
  int inside = 0, total = 0;
  std::uint64_t seed = 1000;
  for (double p : probs)
    for (int m : counts) {
      ErrorTrace t;
      t.num_qubits = 1;
      t.add_event({0}, p, m);
      const std::uint64_t n = 100000;
      McResult r = mc_run(t, n, seed++);
      const double want =
          std::pow(1.0 - p, m) + m * p * std::pow(1.0 - p, m - 1);
      const double sigma = std::sqrt(want * (1.0 - want) / double(n));
      inside += std::abs(r.p_success - want) <= 3.0 * sigma ? 1 : 0;
      ++total;
    }
  CHECK(total == 30);
  CHECK(inside == 30);
}

TEST_CASE("correction marker mid-window increases success") {
  ErrorTrace open, split;
  open.num_qubits = split.num_qubits = 1;
  open.add_event({0}, 0.05, 5);
  open.add_event({0}, 0.05, 5);
  split.add_event({0}, 0.05, 5);
  split.add_marker(0);
  split.add_event({0}, 0.05, 5);
  McResult a = mc_run(open, 20000, 7);
  McResult b = mc_run(split, 20000, 7);
  CHECK(b.p_success > a.p_success);
}

TEST_CASE("serial and parallel runs count the same successes") {
  ErrorTrace t;
  t.num_qubits = 3;
  t.add_event({0}, 0.02, 12);
  t.add_event({1}, 0.01, 30);
  t.add_merge(0, 1);
  t.add_event({2}, 0.05, 4);
  t.add_marker(1);
  t.add_event({1}, 0.02, 8);
  McResult serial = mc_run(t, 40000, 9, 1);
  McResult quad = mc_run(t, 40000, 9, 4);
  CHECK(serial.successes == quad.successes);
  CHECK(serial.p_success == quad.p_success);
}

TEST_CASE("certain failure and certain success bound the wilson interval") {
  ErrorTrace sure;
  sure.num_qubits = 1;
  sure.add_event({0}, 1.0, 2); /* two certain firings = certain failure */
  McResult dead = mc_run(sure, 1000, 3);
  CHECK(dead.p_success == 0.0);
  CHECK(dead.ci_low == 0.0);
  CHECK(dead.ci_high > 0.0);
  CHECK(dead.ci_high < 0.01);

  ErrorTrace clean;
  clean.num_qubits = 1;
  clean.add_event({0}, 0.0, 10);
  McResult alive = mc_run(clean, 1000, 3);
  CHECK(alive.p_success == 1.0);
  CHECK(alive.ci_high == 1.0);
  CHECK(alive.ci_low > 0.99);
}

TEST_CASE("added noise never helps") {
  ErrorTrace base;
  base.num_qubits = 1;
  base.add_event({0}, 0.03, 6);
  ErrorTrace more = base;
  more.add_event({0}, 0.2, 2);
  McResult a = mc_run(base, 30000, 11);
  McResult b = mc_run(more, 30000, 11);
  CHECK(b.p_success < a.p_success);
}

TEST_CASE("merges spread accumulated error to the partner qubit") {
  /* qubit 0 certainly fires once; merge copies that unit onto qubit 1,
   * whose own single firing then crosses the distance-3 limit */
  ErrorTrace t;
  t.num_qubits = 2;
  t.add_event({0}, 1.0, 1);
  t.add_merge(0, 1);
  t.add_event({1}, 1.0, 1);
  McResult r = mc_run(t, 100, 5);
  CHECK(r.p_success == 0.0);

  /* without the merge both qubits hold one unit each: no failure */
  ErrorTrace u;
  u.num_qubits = 2;
  u.add_event({0}, 1.0, 1);
  u.add_event({1}, 1.0, 1);
  CHECK(mc_run(u, 100, 5).p_success == 1.0);
}

TEST_CASE("transversal cnot expands to seven two-qubit events") {
  Circuit c;
  c.add_qubit("a");
  c.add_qubit("b");
  c.add_gate(GateKind::Cnot, {0, 1});
  RegionLayout lay = layout_for(c, DatapathKind::Qalypso, 1);
  ErrorTrace t = trace_of(c, lay);
  const double p2 = lay.tech.errors.two_qubit.p_fail;
  std::int64_t gate_events = 0;
  for (const TraceOp& op : t.ops)
    if (op.kind == TraceOp::Kind::Event && op.error == ErrorKind::Gate &&
        op.p == p2)
      gate_events += op.multiplicity;
  CHECK(gate_events == 7);
}

TEST_CASE("single-qubit logical gates expand sevenfold") {
  Circuit c;
  c.add_qubit("a");
  c.add_gate(GateKind::H, {0});
  c.add_gate(GateKind::X, {0});
  RegionLayout lay = layout_for(c, DatapathKind::Qalypso, 1);
  ErrorTrace t = trace_of(c, lay);
  const double p1 = lay.tech.errors.one_qubit.p_fail;
  std::int64_t events = 0;
  for (const TraceOp& op : t.ops)
    if (op.kind == TraceOp::Kind::Event && op.p == p1)
      events += op.multiplicity;
  CHECK(events == 14);
}

TEST_CASE("corrections close a window and carry their bundle") {
  Circuit c;
  c.add_qubit("a");
  c.add_gate(GateKind::H, {0});
  c.add_gate(GateKind::Correct, {0});
  c.add_gate(GateKind::H, {0});
  RegionLayout lay = layout_for(c, DatapathKind::Qalypso, 1);
  ErrorTrace t = trace_of(c, lay);
  CHECK(t.marker_count() == 1);
  const double p2 = lay.tech.errors.two_qubit.p_fail;
  const double pm = lay.tech.errors.measure.p_fail;
  std::int64_t syndrome_cx = 0, syndrome_meas = 0;
  for (const TraceOp& op : t.ops) {
    if (op.kind != TraceOp::Kind::Event) continue;
    if (op.p == p2 && op.error == ErrorKind::Gate)
      syndrome_cx += op.multiplicity;
    if (op.p == pm) syndrome_meas += op.multiplicity;
  }
  /* two zero blocks: 7 interactions and 7 measurements each */
  CHECK(syndrome_cx == 14);
  CHECK(syndrome_meas == 14);
}

TEST_CASE("teleports inject the purified epr infidelity") {
  Circuit c;
  c.add_qubit("a");
  c.add_qubit("b");
  c.add_qubit("c");
  for (int rep = 0; rep < 3; ++rep) c.add_gate(GateKind::Cnot, {0, 1});
  c.add_gate(GateKind::Cnot, {0, 2});
  TechModel tech = TechModel::defaults(1);
  RegionLayout lay = instantiate(DatapathConfig::preset(DatapathKind::Qla, 2, 0),
                                 tech);
  ErrorTrace t = trace_of(c, lay);
  const double want =
      1.0 - purify(tech.router.epr_base_fidelity, tech.router.purify_rounds);
  bool found = false;
  for (const TraceOp& op : t.ops)
    if (op.kind == TraceOp::Kind::Event &&
        op.error == ErrorKind::TeleportChannel)
      found |= op.p == doctest::Approx(want).epsilon(1e-12);
  CHECK(found);
}

TEST_CASE("idle gaps appear as per-microsecond slots") {
  /* a waits while 10 serialized measures run on w: idle events accrue */
  Circuit c;
  c.add_qubit("a");
  c.add_qubit("w");
  c.add_gate(GateKind::H, {0});
  for (int i = 0; i < 10; ++i) c.add_gate(GateKind::Measure, {1});
  c.add_gate(GateKind::H, {0});
  RegionLayout lay = layout_for(c, DatapathKind::Qalypso, 1);
  ErrorTrace t = trace_of(c, lay);
  std::int64_t idle_slots = 0;
  for (const TraceOp& op : t.ops)
    if (op.kind == TraceOp::Kind::Event && op.error == ErrorKind::Idle &&
        op.q[0] == 0)
      idle_slots += op.multiplicity;
  /* ten 50 us measures separate a's gates */
  CHECK(idle_slots >= 400);
}

TEST_CASE("every-gate correction beats sparse correction on harsh physics") {
  RandSpec spec;
  spec.gates = 80;
  spec.qubits = 8;
  spec.seed = 19;
  Circuit c = gen_random(spec);
  TechModel tech = TechModel::defaults(2);
  DatapathConfig cfg = fit_datapath(DatapathKind::CqlaPlus, 8, tech);
  double dense =
      mapped_success(c, every_gate_placement(c), cfg, tech, 4000, 77);
  EDistConfig sparse_cfg;
  sparse_cfg.threshold = 8;
  double sparse =
      mapped_success(c, insert_corrections(c, sparse_cfg), cfg, tech, 4000, 77);
  CHECK(dense >= sparse);
}

TEST_CASE("a single uncorrected gate is nearly certain to succeed") {
  Circuit c;
  c.add_qubit("a");
  c.add_gate(GateKind::H, {0});
  TechModel tech = TechModel::defaults(2);
  DatapathConfig cfg = fit_datapath(DatapathKind::Qalypso, 1, tech);
  double p = mapped_success(c, {}, cfg, tech, 20000, 5);
  CHECK(p >= 1.0 - 7.0 * tech.errors.one_qubit.p_fail);
  CHECK(p <= 1.0);
}

TEST_CASE("an uncorrected thousand-gate circuit fails often on set 2") {
  RandSpec spec;
  spec.gates = 1000;
  spec.qubits = 32;
  spec.seed = 3;
  Circuit c = gen_random(spec);
  TechModel tech = TechModel::defaults(2);
  DatapathConfig cfg = fit_datapath(DatapathKind::CqlaPlus, 32, tech);
  double bare = mapped_success(c, {}, cfg, tech, 2000, 21);
  double corrected =
      mapped_success(c, every_gate_placement(c), cfg, tech, 2000, 21);
  CHECK(bare < 0.9);
  CHECK(corrected > bare);
}
