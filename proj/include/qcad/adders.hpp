#pragma once

#include <cstdint>
#include <vector>

#include "qcad/circuit.hpp"

namespace qcad {

enum class AdderKind { Qrca, Qcla };

struct AdderSpec {
  int n = 8;           /* operand width in bits */
  int m = 4;           /* ripple pass width / lookahead block size */
  AdderKind kind = AdderKind::Qrca;

  void validate() const; /* throws std::invalid_argument */
};

/*
 * Generated adder netlist plus its register map.  `a` is unchanged by the
 * circuit; `sum` holds a + b (n + 1 bits including the carry out); every
 * qubit in `ancilla` returns to 0 on all basis inputs.
 */
struct AdderCircuit {
  Circuit circuit;
  std::vector<QubitId> a;
  std::vector<QubitId> b;       /* ripple: rewritten to the sum; lookahead:
                                   restored to the input */
  std::vector<QubitId> sum;
  std::vector<QubitId> ancilla;
  int passes = 0; /* ripple passes or lookahead blocks */
};

/*
 * Ripple-carry adder in the Vedral-Barenco-Ekert style, in place (b becomes
 * the sum).  Bits are processed in ceil(n/m) passes; each pass ripples
 * through a reusable register of m-1 in-block carries, and one saved
 * boundary carry per pass links consecutive passes.  Intermediate passes
 * defer their sum writes until the boundary carries unwind, which restores
 * every carry ancilla to 0.
 */
AdderCircuit gen_qrca(const AdderSpec& spec);

/*
 * Carry-lookahead adder: per-bit generate/propagate, in-block carry chains
 * over blocks of m bits, a Brent-Kung prefix tree across blocks, sum
 * formation into a fresh register, then the exact mirror of the network to
 * disentangle every generate/propagate/prefix ancilla.
 */
AdderCircuit gen_qcla(const AdderSpec& spec);

AdderCircuit gen_adder(const AdderSpec& spec);

/*
 * Bit-exact evaluation of a classical-reversible circuit (X/CNOT/Toffoli;
 * PrepZ resets, Measure is a no-op).  Hierarchical circuits are flattened.
 * Throws std::invalid_argument on any other gate kind or input size
 * mismatch.
 */
std::vector<std::uint8_t> classical_sim(const Circuit& c,
                                        const std::vector<std::uint8_t>& input);

/* Convenience for adder tests: packs integers, runs, unpacks the sum. */
std::uint64_t run_adder(const AdderCircuit& ac, std::uint64_t a,
                        std::uint64_t b, bool* ancilla_clean = nullptr,
                        bool* b_restored = nullptr);

}  // namespace qcad
