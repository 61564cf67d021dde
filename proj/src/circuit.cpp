#include "qcad/circuit.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

namespace qcad {

int gate_arity(GateKind k) {
  switch (k) {
    case GateKind::Cnot:
      return 2;
    case GateKind::Toffoli:
      return 3;
    default:
      return 1;
  }
}

std::string_view gate_name(GateKind k) {
  switch (k) {
    case GateKind::X: return "x";
    case GateKind::Z: return "z";
    case GateKind::H: return "h";
    case GateKind::S: return "s";
    case GateKind::T: return "t";
    case GateKind::Cnot: return "cnot";
    case GateKind::Toffoli: return "toffoli";
    case GateKind::PrepZ: return "prepz";
    case GateKind::Measure: return "measure";
    case GateKind::Correct: return "correct";
  }
  return "?";
}

std::optional<GateKind> gate_from_name(std::string_view name, bool& inverse) {
  inverse = false;
  if (name == "x") return GateKind::X;
  if (name == "z") return GateKind::Z;
  if (name == "h") return GateKind::H;
  if (name == "s") return GateKind::S;
  if (name == "t") return GateKind::T;
  if (name == "tdag") {
    inverse = true;
    return GateKind::T;
  }
  if (name == "cnot") return GateKind::Cnot;
  if (name == "toffoli") return GateKind::Toffoli;
  if (name == "prepz") return GateKind::PrepZ;
  if (name == "measure") return GateKind::Measure;
  if (name == "correct") return GateKind::Correct;
  return std::nullopt;
}

Gate Gate::make(GateId id, GateKind kind, std::span<const QubitId> ops,
                bool inverse, std::string tag) {
  Gate g;
  g.id = id;
  g.kind = kind;
  g.inverse = inverse;
  g.tag = std::move(tag);
  g.arity = static_cast<std::uint8_t>(ops.size());
  for (std::size_t i = 0; i < ops.size() && i < 3; ++i) g.operands[i] = ops[i];
  return g;
}

QubitId Circuit::add_qubit(std::string name, QubitKind kind) {
  const auto id = static_cast<QubitId>(qubits.size());
  qubits.push_back(Qubit{id, kind, std::move(name)});
  return id;
}

GateId Circuit::add_gate(GateKind kind, std::span<const QubitId> ops,
                         bool inverse, std::string tag) {
  const auto id = static_cast<GateId>(gates.size());
  gates.push_back(Gate::make(id, kind, ops, inverse, std::move(tag)));
  if (!items.empty()) items.push_back(TopItem{false, id, -1});
  return id;
}

GateId Circuit::add_gate(GateKind kind, std::initializer_list<QubitId> ops,
                         bool inverse, std::string tag) {
  return add_gate(kind, std::span<const QubitId>(ops.begin(), ops.size()),
                  inverse, std::move(tag));
}

const ModuleDef* Circuit::find_module(std::string_view name) const {
  for (const auto& m : modules)
    if (m.name == name) return &m;
  return nullptr;
}

std::size_t Circuit::depth() const {
  std::vector<std::size_t> level(qubits.size(), 0);
  std::size_t best = 0;
  for (const auto& g : gates) {
    std::size_t v = 0;
    for (QubitId q : g.qubits()) v = std::max(v, level[q]);
    ++v;
    for (QubitId q : g.qubits()) level[q] = v;
    best = std::max(best, v);
  }
  return best;
}

void Circuit::validate() const {
  const auto n = static_cast<QubitId>(qubits.size());
  for (std::size_t i = 0; i < gates.size(); ++i) {
    const auto& g = gates[i];
    if (g.id != static_cast<GateId>(i))
      throw std::invalid_argument("gate " + std::to_string(g.id) +
                                  ": id does not match storage order");
    if (g.arity != gate_arity(g.kind))
      throw std::invalid_argument("gate " + std::to_string(g.id) +
                                  ": arity mismatch for " +
                                  std::string(gate_name(g.kind)));
    for (QubitId q : g.qubits())
      if (q < 0 || q >= n)
        throw std::invalid_argument("gate " + std::to_string(g.id) +
                                    ": operand out of range");
    for (int i = 0; i < g.arity; ++i)
      for (int j = i + 1; j < g.arity; ++j)
        if (g.operands[i] == g.operands[j])
          throw std::invalid_argument("gate " + std::to_string(g.id) +
                                      ": repeated operand");
  }
}

bool Circuit::structurally_equal(const Circuit& other) const {
  if (qubits.size() != other.qubits.size()) return false;
  for (std::size_t i = 0; i < qubits.size(); ++i) {
    if (qubits[i].name != other.qubits[i].name ||
        qubits[i].kind != other.qubits[i].kind)
      return false;
  }
  if (gates.size() != other.gates.size()) return false;
  for (std::size_t i = 0; i < gates.size(); ++i) {
    const auto& a = gates[i];
    const auto& b = other.gates[i];
    if (a.kind != b.kind || a.inverse != b.inverse || a.arity != b.arity)
      return false;
    for (int k = 0; k < a.arity; ++k)
      if (a.operands[k] != b.operands[k]) return false;
  }
  if (modules.size() != other.modules.size()) return false;
  for (std::size_t i = 0; i < modules.size(); ++i) {
    const auto& a = modules[i];
    const auto& b = other.modules[i];
    if (a.name != b.name || a.ports != b.ports || a.locals != b.locals ||
        a.local_kinds != b.local_kinds)
      return false;
    if (a.body.size() != b.body.size()) return false;
    for (std::size_t j = 0; j < a.body.size(); ++j) {
      const auto& sa = a.body[j];
      const auto& sb = b.body[j];
      if (sa.is_inst != sb.is_inst || sa.kind != sb.kind ||
          sa.inverse != sb.inverse || sa.callee != sb.callee ||
          sa.args != sb.args)
        return false;
    }
  }
  if (instances.size() != other.instances.size()) return false;
  for (std::size_t i = 0; i < instances.size(); ++i) {
    if (instances[i].module != other.instances[i].module ||
        instances[i].args != other.instances[i].args)
      return false;
  }
  if (items.size() != other.items.size()) return false;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (items[i].is_inst != other.items[i].is_inst ||
        items[i].gate != other.items[i].gate ||
        items[i].inst != other.items[i].inst)
      return false;
  }
  return true;
}

Dag build_dag_from_chains(std::size_t num_gates,
                          std::vector<std::vector<GateId>> chains) {
  Dag dag;
  dag.qubit_chain = std::move(chains);
  dag.preds.assign(num_gates, {});
  dag.succs.assign(num_gates, {});
  dag.edge_count = 0;

  for (const auto& chain : dag.qubit_chain) {
    if (chain.empty()) continue;
    dag.edge_count += chain.size() - 1;
    for (std::size_t i = 0; i + 1 < chain.size(); ++i) {
      dag.preds[chain[i + 1]].push_back(chain[i]);
      dag.succs[chain[i]].push_back(chain[i + 1]);
    }
  }
  for (auto& v : dag.preds) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  }
  for (auto& v : dag.succs) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  }

  /* Kahn pass; a cycle means the per-qubit orders are inconsistent. */
  std::vector<int> indeg(num_gates, 0);
  for (std::size_t g = 0; g < num_gates; ++g)
    indeg[g] = static_cast<int>(dag.preds[g].size());
  std::vector<GateId> stack;
  for (std::size_t g = 0; g < num_gates; ++g)
    if (indeg[g] == 0) stack.push_back(static_cast<GateId>(g));
  /* Keep the smallest-id-first order so topo is deterministic. */
  std::sort(stack.rbegin(), stack.rend());
  dag.topo.reserve(num_gates);
  std::vector<std::size_t> len(num_gates, 1);
  while (!stack.empty()) {
    const GateId g = stack.back();
    stack.pop_back();
    dag.topo.push_back(g);
    for (GateId s : dag.succs[g]) {
      len[s] = std::max(len[s], len[g] + 1);
      if (--indeg[s] == 0) stack.push_back(s);
    }
    std::sort(stack.rbegin(), stack.rend());
  }
  if (dag.topo.size() != num_gates)
    throw std::invalid_argument("cycle detected: corrupted gate order");
  for (std::size_t g = 0; g < num_gates; ++g)
    dag.longest_path = std::max(dag.longest_path, len[g]);
  if (num_gates == 0) dag.longest_path = 0;
  return dag;
}

Dag build_dag(const Circuit& c) {
  if (c.hierarchical())
    throw std::invalid_argument("build_dag requires a flat circuit");
  c.validate();
  std::vector<std::vector<GateId>> chains(c.qubits.size());
  for (const auto& g : c.gates)
    for (QubitId q : g.qubits()) chains[q].push_back(g.id);
  return build_dag_from_chains(c.gates.size(), std::move(chains));
}

namespace {

void expand_module(const Circuit& src, const ModuleDef& def,
                   const std::vector<QubitId>& args, const std::string& path,
                   std::vector<std::string>& stack, Circuit& out) {
  if (args.size() != def.ports.size())
    throw std::invalid_argument("instance of '" + def.name + "': expected " +
                                std::to_string(def.ports.size()) +
                                " arguments, got " +
                                std::to_string(args.size()));
  for (const auto& open : stack)
    if (open == def.name)
      throw std::invalid_argument("recursive instantiation of module '" +
                                  def.name + "'");
  stack.push_back(def.name);

  std::unordered_map<std::string, QubitId> env;
  for (std::size_t i = 0; i < def.ports.size(); ++i) env[def.ports[i]] = args[i];
  for (std::size_t i = 0; i < def.locals.size(); ++i)
    env[def.locals[i]] = out.add_qubit(path + "/" + def.locals[i],
                                       def.local_kinds[i]);

  for (const auto& stmt : def.body) {
    std::vector<QubitId> ops;
    ops.reserve(stmt.args.size());
    for (const auto& name : stmt.args) {
      auto it = env.find(name);
      if (it == env.end())
        throw std::invalid_argument("module '" + def.name +
                                    "': unknown qubit '" + name + "'");
      ops.push_back(it->second);
    }
    if (stmt.is_inst) {
      const ModuleDef* callee = src.find_module(stmt.callee);
      if (!callee)
        throw std::invalid_argument("unknown module '" + stmt.callee + "'");
      expand_module(src, *callee, ops, path + "/" + stmt.callee, stack, out);
    } else {
      out.add_gate(stmt.kind, ops, stmt.inverse, path);
    }
  }
  stack.pop_back();
}

}  // namespace

Circuit flatten(const Circuit& c) {
  Circuit out;
  out.qubits = c.qubits;
  if (!c.hierarchical()) {
    out.gates = c.gates;
    return out;
  }
  std::vector<std::string> stack;
  for (const auto& item : c.items) {
    if (!item.is_inst) {
      const Gate& g = c.gates[item.gate];
      out.add_gate(g.kind, g.qubits(), g.inverse, g.tag);
      continue;
    }
    const Instance& inst = c.instances[item.inst];
    const ModuleDef* def = c.find_module(inst.module);
    if (!def)
      throw std::invalid_argument("unknown module '" + inst.module + "'");
    expand_module(c, *def, inst.args, inst.module, stack, out);
  }
  return out;
}

Circuit decompose_toffoli(const Circuit& c) {
  if (c.hierarchical())
    throw std::invalid_argument("decompose_toffoli requires a flat circuit");
  Circuit out;
  out.qubits = c.qubits;
  for (const auto& g : c.gates) {
    if (g.kind != GateKind::Toffoli) {
      out.add_gate(g.kind, g.qubits(), g.inverse, g.tag);
      continue;
    }
    const QubitId a = g.operands[0];
    const QubitId b = g.operands[1];
    const QubitId t = g.operands[2];
    const auto& tag = g.tag;
    out.add_gate(GateKind::H, {t}, false, tag);
    out.add_gate(GateKind::Cnot, {b, t}, false, tag);
    out.add_gate(GateKind::T, {t}, true, tag);
    out.add_gate(GateKind::Cnot, {a, t}, false, tag);
    out.add_gate(GateKind::T, {t}, false, tag);
    out.add_gate(GateKind::Cnot, {b, t}, false, tag);
    out.add_gate(GateKind::T, {t}, true, tag);
    out.add_gate(GateKind::Cnot, {a, t}, false, tag);
    out.add_gate(GateKind::T, {b}, false, tag);
    out.add_gate(GateKind::T, {t}, false, tag);
    out.add_gate(GateKind::H, {t}, false, tag);
    out.add_gate(GateKind::Cnot, {a, b}, false, tag);
    out.add_gate(GateKind::T, {a}, false, tag);
    out.add_gate(GateKind::T, {b}, true, tag);
    out.add_gate(GateKind::Cnot, {a, b}, false, tag);
  }
  return out;
}

}  // namespace qcad
