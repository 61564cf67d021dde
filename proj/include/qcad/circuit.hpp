#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace qcad {

using QubitId = std::int32_t;
using GateId = std::int32_t;

enum class QubitKind : std::uint8_t { Data, ZeroAncilla, TAncilla };

enum class GateKind : std::uint8_t {
  X,
  Z,
  H,
  S,
  T,
  Cnot,
  Toffoli,
  PrepZ,
  Measure,
  Correct,
};

constexpr int kGateKindCount = 10;

int gate_arity(GateKind k);
std::string_view gate_name(GateKind k);

/* Maps a lowercase netlist mnemonic ("tdag" sets inverse). */
std::optional<GateKind> gate_from_name(std::string_view name, bool& inverse);

struct Qubit {
  QubitId id = -1;
  QubitKind kind = QubitKind::Data;
  std::string name;

  bool operator==(const Qubit&) const = default;
};

struct Gate {
  GateId id = -1;
  GateKind kind = GateKind::X;
  bool inverse = false;  /* only t/tdag distinguish on this */
  QubitId operands[3] = {-1, -1, -1};
  std::uint8_t arity = 0;
  std::string tag;  /* module-path provenance, empty for top-level gates */

  std::span<const QubitId> qubits() const { return {operands, arity}; }
  static Gate make(GateId id, GateKind kind, std::span<const QubitId> ops,
                   bool inverse = false, std::string tag = {});
};

/* One body statement of a module definition: a gate or a nested instance. */
struct ModuleStmt {
  bool is_inst = false;
  GateKind kind = GateKind::X;
  bool inverse = false;
  std::string callee;             /* instantiated module name */
  std::vector<std::string> args;  /* port/local qubit names */
};

struct ModuleDef {
  std::string name;
  std::vector<std::string> ports;
  std::vector<std::string> locals;  /* fresh qubits per instantiation */
  std::vector<QubitKind> local_kinds;
  std::vector<ModuleStmt> body;
};

/* Top-level program item; flat circuits carry gates only. */
struct TopItem {
  bool is_inst = false;
  GateId gate = -1;    /* index into Circuit::gates */
  int inst = -1;       /* index into Circuit::instances */
};

struct Instance {
  std::string module;
  std::vector<QubitId> args;
};

class Circuit {
 public:
  std::vector<Qubit> qubits;
  std::vector<Gate> gates;  /* stored in a valid topological order */
  std::vector<ModuleDef> modules;
  std::vector<Instance> instances;
  std::vector<TopItem> items;  /* nonempty iff the circuit is hierarchical */

  bool hierarchical() const { return !instances.empty(); }

  QubitId add_qubit(std::string name, QubitKind kind = QubitKind::Data);
  GateId add_gate(GateKind kind, std::span<const QubitId> ops,
                  bool inverse = false, std::string tag = {});
  GateId add_gate(GateKind kind, std::initializer_list<QubitId> ops,
                  bool inverse = false, std::string tag = {});

  const ModuleDef* find_module(std::string_view name) const;

  /* Longest per-qubit dependency chain, in gates. */
  std::size_t depth() const;

  /* Throws std::invalid_argument on out-of-range operands or bad arity. */
  void validate() const;

  /* Structural comparison; provenance tags are not part of the structure. */
  bool structurally_equal(const Circuit& other) const;
};

struct Dag {
  /* Gate ids in program order, per qubit. */
  std::vector<std::vector<GateId>> qubit_chain;
  std::vector<std::vector<GateId>> preds;  /* deduplicated */
  std::vector<std::vector<GateId>> succs;
  std::size_t edge_count = 0;  /* chain adjacencies, multiplicity kept */
  std::vector<GateId> topo;
  std::size_t longest_path = 0;  /* in gates */
};

/* Circuit must be flat.  Throws std::invalid_argument on corrupted order. */
Dag build_dag(const Circuit& c);

/* Test seam: builds from explicit per-qubit chains, detecting cycles. */
Dag build_dag_from_chains(std::size_t num_gates,
                          std::vector<std::vector<GateId>> chains);

/*
 * Expands instances recursively into a flat gate list.  Local qubits become
 * fresh qubits named <path>/<local>.  Gate provenance tags record the
 * instantiation path.  Throws std::invalid_argument on unknown modules,
 * argument count mismatches, or recursive instantiation.
 */
Circuit flatten(const Circuit& c);

/*
 * Replaces each Toffoli with the standard 15-gate network over
 * {H, T, Tdag, CNOT}.  Other gates pass through unchanged.
 */
Circuit decompose_toffoli(const Circuit& c);

}  // namespace qcad
