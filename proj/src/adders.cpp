#include "qcad/adders.hpp"

#include <algorithm>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>

namespace qcad {

void AdderSpec::validate() const {
  if (n < 1) throw std::invalid_argument("adder width must be >= 1");
  if (m < 1 || m > n)
    throw std::invalid_argument("sub-adder width must satisfy 1 <= m <= n");
}

namespace {

std::string idx_name(const char* stem, int i) {
  return std::string(stem) + std::to_string(i);
}

/* carry' ^= MAJ(carry, x, y); y ^= x.  carry < 0 means a structural zero. */
struct VbeOps {
  Circuit& c;

  void carry(QubitId cin, QubitId x, QubitId y, QubitId cout,
             const std::string& tag) {
    c.add_gate(GateKind::Toffoli, {x, y, cout}, false, tag);
    c.add_gate(GateKind::Cnot, {x, y}, false, tag);
    if (cin >= 0) c.add_gate(GateKind::Toffoli, {cin, y, cout}, false, tag);
  }
  void carry_dg(QubitId cin, QubitId x, QubitId y, QubitId cout,
                const std::string& tag) {
    if (cin >= 0) c.add_gate(GateKind::Toffoli, {cin, y, cout}, false, tag);
    c.add_gate(GateKind::Cnot, {x, y}, false, tag);
    c.add_gate(GateKind::Toffoli, {x, y, cout}, false, tag);
  }
  void sum(QubitId cin, QubitId x, QubitId y, const std::string& tag) {
    c.add_gate(GateKind::Cnot, {x, y}, false, tag);
    if (cin >= 0) c.add_gate(GateKind::Cnot, {cin, y}, false, tag);
  }
};

}  // namespace

AdderCircuit gen_qrca(const AdderSpec& spec) {
  spec.validate();
  const int n = spec.n;
  const int m = spec.m;
  const int passes = (n + m - 1) / m;

  AdderCircuit ac;
  Circuit& c = ac.circuit;
  for (int i = 0; i < n; ++i) ac.a.push_back(c.add_qubit(idx_name("a", i)));
  for (int i = 0; i < n; ++i) ac.b.push_back(c.add_qubit(idx_name("b", i)));
  const QubitId cout = c.add_qubit("cout");
  /* in-block carry register, reused by every pass (slot t = carry into the
   * pass-local bit t) */
  std::vector<QubitId> r(static_cast<std::size_t>(m), -1);
  for (int t = 1; t < m; ++t)
    r[static_cast<std::size_t>(t)] =
        c.add_qubit(idx_name("c", t), QubitKind::ZeroAncilla);
  /* saved carry between pass k and pass k+1 */
  std::vector<QubitId> s;
  for (int k = 0; k + 1 < passes; ++k)
    s.push_back(c.add_qubit(idx_name("s", k), QubitKind::ZeroAncilla));

  ac.sum = ac.b;
  ac.sum.push_back(cout);
  for (int t = 1; t < m; ++t) ac.ancilla.push_back(r[static_cast<std::size_t>(t)]);
  for (QubitId q : s) ac.ancilla.push_back(q);
  ac.passes = passes;

  c.add_gate(GateKind::PrepZ, {cout});
  for (QubitId q : ac.ancilla) c.add_gate(GateKind::PrepZ, {q});

  VbeOps ops{c};
  const auto cin_of = [&](int k, int t) -> QubitId {
    if (t > 0) return r[static_cast<std::size_t>(t)];
    return k == 0 ? -1 : s[static_cast<std::size_t>(k - 1)];
  };

  /* forward: ripple every pass; intermediate passes keep only their saved
   * carry (sums wait until the unwind so the register can be reused) */
  for (int k = 0; k < passes; ++k) {
    const int off = k * m;
    const int sz = std::min(m, n - off);
    const std::string tag = idx_name("pass", k);
    for (int t = 0; t < sz; ++t) {
      const QubitId co =
          t + 1 < sz ? r[static_cast<std::size_t>(t + 1)]
                     : (k + 1 < passes ? s[static_cast<std::size_t>(k)] : cout);
      ops.carry(cin_of(k, t), ac.a[static_cast<std::size_t>(off + t)],
                ac.b[static_cast<std::size_t>(off + t)], co, tag);
    }
    if (k + 1 < passes) {
      for (int t = sz - 2; t >= 0; --t)
        ops.carry_dg(cin_of(k, t), ac.a[static_cast<std::size_t>(off + t)],
                     ac.b[static_cast<std::size_t>(off + t)],
                     r[static_cast<std::size_t>(t + 1)], tag);
    } else {
      const int top = off + sz - 1;
      c.add_gate(GateKind::Cnot,
                 {ac.a[static_cast<std::size_t>(top)],
                  ac.b[static_cast<std::size_t>(top)]},
                 false, tag);
      ops.sum(cin_of(k, sz - 1), ac.a[static_cast<std::size_t>(top)],
              ac.b[static_cast<std::size_t>(top)], tag);
      for (int t = sz - 2; t >= 0; --t) {
        ops.carry_dg(cin_of(k, t), ac.a[static_cast<std::size_t>(off + t)],
                     ac.b[static_cast<std::size_t>(off + t)],
                     r[static_cast<std::size_t>(t + 1)], tag);
        ops.sum(cin_of(k, t), ac.a[static_cast<std::size_t>(off + t)],
                ac.b[static_cast<std::size_t>(off + t)], tag);
      }
    }
  }

  /* unwind: re-ripple each earlier pass, clear its saved carry, write sums */
  for (int k = passes - 2; k >= 0; --k) {
    const int off = k * m;
    const int sz = std::min(m, n - off);
    const int top = off + sz - 1;
    const std::string tag = idx_name("pass", k);
    for (int t = 0; t + 1 < sz; ++t)
      ops.carry(cin_of(k, t), ac.a[static_cast<std::size_t>(off + t)],
                ac.b[static_cast<std::size_t>(off + t)],
                r[static_cast<std::size_t>(t + 1)], tag);
    ops.carry_dg(cin_of(k, sz - 1), ac.a[static_cast<std::size_t>(top)],
                 ac.b[static_cast<std::size_t>(top)],
                 s[static_cast<std::size_t>(k)], tag);
    ops.sum(cin_of(k, sz - 1), ac.a[static_cast<std::size_t>(top)],
            ac.b[static_cast<std::size_t>(top)], tag);
    for (int t = sz - 2; t >= 0; --t) {
      ops.carry_dg(cin_of(k, t), ac.a[static_cast<std::size_t>(off + t)],
                   ac.b[static_cast<std::size_t>(off + t)],
                   r[static_cast<std::size_t>(t + 1)], tag);
      ops.sum(cin_of(k, t), ac.a[static_cast<std::size_t>(off + t)],
              ac.b[static_cast<std::size_t>(off + t)], tag);
    }
  }
  c.validate();
  return ac;
}

namespace {

/* Prefix tree over block (generate, propagate) pairs.  Up-sweep combines in
 * place onto right-child generate qubits; down-sweep materializes each
 * block's carry-in into a fresh ancilla. */
struct PrefixTree {
  struct Node {
    int lo = 0, hi = 0;
    int left = -1, right = -1;
    QubitId g = -1, p = -1;
    QubitId cin = -1;
  };
  std::vector<Node> nodes;
  int root = -1;

  int build(int lo, int hi, const std::vector<QubitId>& leaf_g,
            const std::vector<QubitId>& leaf_p) {
    Node nd;
    nd.lo = lo;
    nd.hi = hi;
    if (hi - lo == 1) {
      nd.g = leaf_g[static_cast<std::size_t>(lo)];
      nd.p = leaf_p[static_cast<std::size_t>(lo)];
      nodes.push_back(nd);
      return static_cast<int>(nodes.size()) - 1;
    }
    const int mid = lo + (hi - lo) / 2;
    nd.left = build(lo, mid, leaf_g, leaf_p);
    nd.right = build(mid, hi, leaf_g, leaf_p);
    nodes.push_back(nd);
    return static_cast<int>(nodes.size()) - 1;
  }
};

}  // namespace

AdderCircuit gen_qcla(const AdderSpec& spec) {
  spec.validate();
  const int n = spec.n;
  const int m = spec.m;
  const int blocks = (n + m - 1) / m;

  AdderCircuit ac;
  Circuit& c = ac.circuit;
  for (int i = 0; i < n; ++i) ac.a.push_back(c.add_qubit(idx_name("a", i)));
  for (int i = 0; i < n; ++i) ac.b.push_back(c.add_qubit(idx_name("b", i)));
  for (int i = 0; i <= n; ++i) ac.sum.push_back(c.add_qubit(idx_name("s", i)));
  std::vector<QubitId> g(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    g[static_cast<std::size_t>(i)] =
        c.add_qubit(idx_name("g", i), QubitKind::ZeroAncilla);
    ac.ancilla.push_back(g[static_cast<std::size_t>(i)]);
  }
  /* pp[j][k] = p(off) & ... & p(off+k) for k >= 1 */
  std::vector<std::vector<QubitId>> pp(static_cast<std::size_t>(blocks));
  for (int j = 0; j < blocks; ++j) {
    const int sz = std::min(m, n - j * m);
    pp[static_cast<std::size_t>(j)].assign(static_cast<std::size_t>(sz), -1);
    for (int k = 1; k < sz; ++k) {
      const QubitId q = c.add_qubit(
          "pp" + std::to_string(j) + "_" + std::to_string(k),
          QubitKind::ZeroAncilla);
      pp[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)] = q;
      ac.ancilla.push_back(q);
    }
  }
  ac.passes = blocks;

  for (QubitId q : ac.sum) c.add_gate(GateKind::PrepZ, {q});
  for (QubitId q : ac.ancilla) c.add_gate(GateKind::PrepZ, {q});

  /* carry network gates are recorded so the disentangling mirror can replay
   * them in reverse (all are self-inverse) */
  struct Rec {
    GateKind kind;
    QubitId q[3];
    int arity;
  };
  std::vector<Rec> net;
  const auto emit = [&](GateKind kind, std::initializer_list<QubitId> qs,
                        const std::string& tag) {
    c.add_gate(kind, qs, false, tag);
    Rec rec{};
    rec.kind = kind;
    rec.arity = static_cast<int>(qs.size());
    int i = 0;
    for (QubitId q : qs) rec.q[i++] = q;
    net.push_back(rec);
  };

  /* generate/propagate: g_i = a_i & b_i, b_i holds p_i afterwards */
  for (int i = 0; i < n; ++i) {
    emit(GateKind::Toffoli,
         {ac.a[static_cast<std::size_t>(i)], ac.b[static_cast<std::size_t>(i)],
          g[static_cast<std::size_t>(i)]},
         "pg");
    emit(GateKind::Cnot,
         {ac.a[static_cast<std::size_t>(i)], ac.b[static_cast<std::size_t>(i)]},
         "pg");
  }
  /* in-block chains: g slot i becomes the carry out of the block's bits up
   * to i under a zero block carry-in */
  for (int j = 0; j < blocks; ++j) {
    const int off = j * m;
    const int sz = std::min(m, n - off);
    for (int k = 1; k < sz; ++k)
      emit(GateKind::Toffoli,
           {ac.b[static_cast<std::size_t>(off + k)],
            g[static_cast<std::size_t>(off + k - 1)],
            g[static_cast<std::size_t>(off + k)]},
           "chain");
    for (int k = 1; k < sz; ++k) {
      const QubitId lo_p = k == 1 ? ac.b[static_cast<std::size_t>(off)]
                                  : pp[static_cast<std::size_t>(j)]
                                      [static_cast<std::size_t>(k - 1)];
      emit(GateKind::Toffoli,
           {lo_p, ac.b[static_cast<std::size_t>(off + k)],
            pp[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)]},
           "chain");
    }
  }

  /* prefix tree across blocks */
  std::vector<QubitId> leaf_g(static_cast<std::size_t>(blocks));
  std::vector<QubitId> leaf_p(static_cast<std::size_t>(blocks));
  for (int j = 0; j < blocks; ++j) {
    const int off = j * m;
    const int sz = std::min(m, n - off);
    leaf_g[static_cast<std::size_t>(j)] =
        g[static_cast<std::size_t>(off + sz - 1)];
    leaf_p[static_cast<std::size_t>(j)] =
        sz >= 2 ? pp[static_cast<std::size_t>(j)][static_cast<std::size_t>(sz - 1)]
                : ac.b[static_cast<std::size_t>(off)];
  }
  PrefixTree tree;
  tree.root = tree.build(0, blocks, leaf_g, leaf_p);

  int serial = 0;
  const std::function<void(int)> up = [&](int v) {
    PrefixTree::Node& nd = tree.nodes[static_cast<std::size_t>(v)];
    if (nd.left < 0) return;
    up(nd.left);
    up(nd.right);
    const PrefixTree::Node& l = tree.nodes[static_cast<std::size_t>(nd.left)];
    const PrefixTree::Node& r = tree.nodes[static_cast<std::size_t>(nd.right)];
    emit(GateKind::Toffoli, {r.p, l.g, r.g}, "tree");
    const QubitId prod =
        c.add_qubit(idx_name("tp", serial++), QubitKind::ZeroAncilla);
    ac.ancilla.push_back(prod);
    c.add_gate(GateKind::PrepZ, {prod});
    emit(GateKind::Toffoli, {l.p, r.p, prod}, "tree");
    nd.g = r.g;
    nd.p = prod;
  };
  up(tree.root);

  const std::function<void(int, QubitId)> down = [&](int v, QubitId cin) {
    PrefixTree::Node& nd = tree.nodes[static_cast<std::size_t>(v)];
    nd.cin = cin;
    if (nd.left < 0) return;
    const PrefixTree::Node& l = tree.nodes[static_cast<std::size_t>(nd.left)];
    const QubitId carry =
        c.add_qubit(idx_name("tc", serial++), QubitKind::ZeroAncilla);
    ac.ancilla.push_back(carry);
    c.add_gate(GateKind::PrepZ, {carry});
    emit(GateKind::Cnot, {l.g, carry}, "tree");
    if (cin >= 0) emit(GateKind::Toffoli, {l.p, cin, carry}, "tree");
    down(nd.left, cin);
    down(nd.right, carry);
  };
  down(tree.root, -1);

  std::vector<QubitId> block_cin(static_cast<std::size_t>(blocks), -1);
  for (const auto& nd : tree.nodes)
    if (nd.left < 0) block_cin[static_cast<std::size_t>(nd.lo)] = nd.cin;

  /* sums: s_i = p_i ^ carry_i, with carry_i rebuilt from the in-block chain
   * value and the block carry-in; top carry comes straight off the root */
  for (int j = 0; j < blocks; ++j) {
    const int off = j * m;
    const int sz = std::min(m, n - off);
    const QubitId cj = block_cin[static_cast<std::size_t>(j)];
    c.add_gate(GateKind::Cnot,
               {ac.b[static_cast<std::size_t>(off)],
                ac.sum[static_cast<std::size_t>(off)]},
               false, "sum");
    if (cj >= 0)
      c.add_gate(GateKind::Cnot,
                 {cj, ac.sum[static_cast<std::size_t>(off)]}, false, "sum");
    for (int k = 1; k < sz; ++k) {
      const int i = off + k;
      c.add_gate(GateKind::Cnot,
                 {ac.b[static_cast<std::size_t>(i)],
                  ac.sum[static_cast<std::size_t>(i)]},
                 false, "sum");
      c.add_gate(GateKind::Cnot,
                 {g[static_cast<std::size_t>(i - 1)],
                  ac.sum[static_cast<std::size_t>(i)]},
                 false, "sum");
      if (cj >= 0) {
        const QubitId prefix =
            k == 1 ? ac.b[static_cast<std::size_t>(off)]
                   : pp[static_cast<std::size_t>(j)]
                       [static_cast<std::size_t>(k - 1)];
        c.add_gate(GateKind::Toffoli,
                   {prefix, cj, ac.sum[static_cast<std::size_t>(i)]}, false,
                   "sum");
      }
    }
  }
  c.add_gate(GateKind::Cnot,
             {tree.nodes[static_cast<std::size_t>(tree.root)].g,
              ac.sum[static_cast<std::size_t>(n)]},
             false, "sum");

  /* disentangle: exact mirror of the carry network */
  for (auto it = net.rbegin(); it != net.rend(); ++it)
    c.add_gate(it->kind, std::span<const QubitId>(it->q, static_cast<std::size_t>(it->arity)),
               false, "mirror");

  c.validate();
  return ac;
}

AdderCircuit gen_adder(const AdderSpec& spec) {
  return spec.kind == AdderKind::Qrca ? gen_qrca(spec) : gen_qcla(spec);
}

std::vector<std::uint8_t> classical_sim(const Circuit& c0,
                                        const std::vector<std::uint8_t>& input) {
  Circuit flat_storage;
  const Circuit* cp = &c0;
  if (c0.hierarchical()) {
    flat_storage = flatten(c0);
    cp = &flat_storage;
  }
  const Circuit& c = *cp;
  if (input.size() != c.qubits.size())
    throw std::invalid_argument("classical_sim: input has " +
                                std::to_string(input.size()) + " bits for " +
                                std::to_string(c.qubits.size()) + " qubits");
  std::vector<std::uint8_t> st(input.size());
  for (std::size_t i = 0; i < input.size(); ++i) st[i] = input[i] ? 1 : 0;
  for (const Gate& gate : c.gates) {
    const auto q0 = static_cast<std::size_t>(gate.operands[0]);
    switch (gate.kind) {
      case GateKind::X:
        st[q0] ^= 1;
        break;
      case GateKind::Cnot:
        st[static_cast<std::size_t>(gate.operands[1])] ^= st[q0];
        break;
      case GateKind::Toffoli:
        st[static_cast<std::size_t>(gate.operands[2])] ^=
            st[q0] & st[static_cast<std::size_t>(gate.operands[1])];
        break;
      case GateKind::PrepZ:
        st[q0] = 0;
        break;
      case GateKind::Measure:
      case GateKind::Correct: /* identity on basis states */
        break;
      default:
        throw std::invalid_argument(
            std::string("classical_sim: non-classical gate ") +
            std::string(gate_name(gate.kind)));
    }
  }
  return st;
}

std::uint64_t run_adder(const AdderCircuit& ac, std::uint64_t a,
                        std::uint64_t b, bool* ancilla_clean,
                        bool* b_restored) {
  const auto n = ac.a.size();
  if (ac.sum.size() > 64)
    throw std::invalid_argument("run_adder supports sums up to 64 bits");
  std::vector<std::uint8_t> in(ac.circuit.qubits.size(), 0);
  for (std::size_t i = 0; i < n; ++i) {
    in[static_cast<std::size_t>(ac.a[i])] = (a >> i) & 1;
    in[static_cast<std::size_t>(ac.b[i])] = (b >> i) & 1;
  }
  const auto out = classical_sim(ac.circuit, in);
  std::uint64_t sum = 0;
  for (std::size_t i = 0; i < ac.sum.size(); ++i)
    sum |= static_cast<std::uint64_t>(out[static_cast<std::size_t>(ac.sum[i])])
           << i;
  if (ancilla_clean) {
    *ancilla_clean = true;
    for (QubitId q : ac.ancilla)
      if (out[static_cast<std::size_t>(q)]) *ancilla_clean = false;
  }
  if (b_restored) {
    *b_restored = true;
    for (std::size_t i = 0; i < n; ++i)
      if (out[static_cast<std::size_t>(ac.b[i])] !=
          in[static_cast<std::size_t>(ac.b[i])])
        *b_restored = false;
  }
  return sum;
}

}  // namespace qcad
