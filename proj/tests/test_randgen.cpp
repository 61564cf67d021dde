#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
#include "qcad/circuit.hpp"
#include "qcad/randgen.hpp"

using namespace qcad;

TEST_CASE("generated circuit matches the requested shape") {
  RandSpec spec;
  spec.gates = 200;
  spec.qubits = 16;
  spec.seed = 5;
  Circuit c = gen_random(spec);
  CHECK(c.gates.size() == 200);
  CHECK(c.qubits.size() == 16);
  c.validate();
}

TEST_CASE("single-gate spec yields a single gate") {
  RandSpec spec;
  spec.gates = 1;
  spec.qubits = 2;
  CHECK(gen_random(spec).gates.size() == 1);
}

TEST_CASE("same seed reproduces the circuit, different seed does not") {
  RandSpec spec;
  spec.gates = 300;
  spec.qubits = 24;
  spec.seed = 77;
  Circuit a = gen_random(spec);
  Circuit b = gen_random(spec);
  CHECK(a.structurally_equal(b));
  spec.seed = 78;
  CHECK_FALSE(gen_random(spec).structurally_equal(a));
}

TEST_CASE("spec validation rejects out-of-range fields") {
  RandSpec spec;
  spec.gates = 0;
  spec.qubits = 4;
  CHECK_THROWS(spec.validate());
  spec.gates = 5;
  spec.qubits = 1;
  CHECK_THROWS(spec.validate());
  spec.qubits = 4;
  spec.rent = 1.5;
  CHECK_THROWS(spec.validate());
  spec.rent = 0.5;
  spec.two_qubit_fraction = -0.1;
  CHECK_THROWS(spec.validate());
}

TEST_CASE("two-qubit fraction controls the gate mix") {
  RandSpec spec;
  spec.gates = 1000;
  spec.qubits = 32;
  spec.seed = 2;
  spec.two_qubit_fraction = 0.3;
  Circuit c = gen_random(spec);
  std::size_t two = 0;
  for (const Gate& g : c.gates) two += g.arity == 2;
  CHECK(double(two) / double(c.gates.size()) ==
        doctest::Approx(0.3).epsilon(0.15));
}

TEST_CASE("measured rent tracks the requested exponent at 3500 gates") {
  RandSpec spec;
  spec.gates = 3500;
  spec.qubits = 1000;
  spec.rent = 0.5;
  spec.seed = 1;
  double r = measure_rent(gen_random(spec));
  CHECK(r >= 0.4);
  CHECK(r <= 0.6);
}

TEST_CASE("measure_rent requires at least 64 qubits") {
  RandSpec spec;
  spec.gates = 100;
  spec.qubits = 16;
  CHECK_THROWS(measure_rent(gen_random(spec)));
}

TEST_CASE("disjoint pairs measure near zero rent") {
  Circuit c;
  for (int i = 0; i < 128; ++i) c.add_qubit("q" + std::to_string(i));
  for (int i = 0; i < 128; i += 2)
    for (int rep = 0; rep < 4; ++rep)
      c.add_gate(GateKind::Cnot, {QubitId(i), QubitId(i + 1)});
  CHECK(measure_rent(c) < 0.2);
}

TEST_CASE("all-to-all interaction measures near unit rent") {
  Circuit c;
  const int n = 64;
  for (int i = 0; i < n; ++i) c.add_qubit("q" + std::to_string(i));
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      c.add_gate(GateKind::Cnot, {QubitId(i), QubitId(j)});
  CHECK(measure_rent(c) > 0.8);
}

TEST_CASE("higher requested rent measures higher, paired seeds") {
  int wins = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    RandSpec hi, lo;
    hi.gates = lo.gates = 3500;
    hi.qubits = lo.qubits = 256;
    hi.seed = lo.seed = seed;
    hi.rent = 0.9;
    lo.rent = 0.5;
    double rh = measure_rent(gen_random(hi));
    double rl = measure_rent(gen_random(lo));
    if (rh > rl) ++wins;
  }
  CHECK(wins == 10);
}
