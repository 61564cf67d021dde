#pragma once

#include <cstdint>

#include "qcad/circuit.hpp"

namespace qcad {

/*
 * Random logical circuit parameterized by communication locality.  Qubits
 * sit at the leaves of a balanced binary partition tree; two-qubit gates
 * pick a subtree level with probability proportional to 2^(level*(rent-1))
 * and draw their operands from the two halves of a random subtree at that
 * level.  rent near 0 keeps traffic local, rent near 1 spreads it globally.
 */
struct RandSpec {
  int gates = 0;
  int qubits = 0;
  double rent = 0.5;
  std::uint64_t seed = 1;
  double two_qubit_fraction = 0.5;

  void validate() const;
};

Circuit gen_random(const RandSpec& spec);

/*
 * Recovers the Rent-style exponent of a circuit: recursive min-cut
 * bisections of the interaction graph, then an ordinary least-squares fit
 * of log2(external wires) against log2(partition size).  Requires at least
 * 64 qubits so the fit spans three or more bisection levels.
 */
double measure_rent(const Circuit& flat);

}  // namespace qcad
