#include "qcad/partition.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace qcad {

InteractionGraph InteractionGraph::from_circuit(const Circuit& flat) {
  if (flat.hierarchical())
    throw std::invalid_argument("interaction graph requires a flat circuit");
  InteractionGraph g;
  g.n = static_cast<int>(flat.qubits.size());
  std::map<std::pair<int, int>, double> weights;
  for (const auto& gate : flat.gates) {
    const auto ops = gate.qubits();
    for (std::size_t i = 0; i < ops.size(); ++i)
      for (std::size_t j = i + 1; j < ops.size(); ++j) {
        const int u = static_cast<int>(ops[i]);
        const int v = static_cast<int>(ops[j]);
        weights[{std::min(u, v), std::max(u, v)}] += 1.0;
      }
  }
  g.adj.assign(g.n, {});
  for (const auto& [edge, w] : weights) {
    g.adj[edge.first].push_back({edge.second, w});
    g.adj[edge.second].push_back({edge.first, w});
  }
  return g;
}

double InteractionGraph::total_weight() const {
  double sum = 0.0;
  for (const auto& nbrs : adj)
    for (const auto& [v, w] : nbrs) sum += w;
  return sum / 2.0;
}

double cut_weight(const InteractionGraph& g, std::span<const int> vertices,
                  std::span<const int> side) {
  std::vector<int> label(g.n, -1);
  for (std::size_t i = 0; i < vertices.size(); ++i) label[vertices[i]] = side[i];
  double cut = 0.0;
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    const int u = vertices[i];
    for (const auto& [v, w] : g.adj[u]) {
      if (label[v] == -1 || v <= u) continue;
      if (label[v] != label[u]) cut += w;
    }
  }
  return cut;
}

double external_weight(const InteractionGraph& g,
                       std::span<const int> inside) {
  std::vector<char> in(g.n, 0);
  for (int v : inside) in[v] = 1;
  double sum = 0.0;
  for (int u : inside)
    for (const auto& [v, w] : g.adj[u])
      if (!in[v]) sum += w;
  return sum;
}

std::vector<int> fm_bisect(const InteractionGraph& g,
                           std::span<const int> vertices,
                           std::size_t side0_size, int max_passes) {
  const std::size_t n = vertices.size();
  if (side0_size > n)
    throw std::invalid_argument("fm_bisect: side size exceeds vertex count");
  std::vector<int> side(n);
  /* deterministic interleaved seed split */
  std::size_t placed0 = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const bool to0 = (i % 2 == 0 && placed0 < side0_size) ||
                     (n - i <= side0_size - placed0);
    side[i] = to0 ? 0 : 1;
    if (to0) ++placed0;
  }

  std::vector<int> pos(g.n, -1);
  for (std::size_t i = 0; i < n; ++i) pos[vertices[i]] = static_cast<int>(i);

  /* gain[i] = cut reduction if vertex i flips sides */
  std::vector<double> gain(n);
  auto recompute_gains = [&]() {
    for (std::size_t i = 0; i < n; ++i) {
      double ext = 0.0, internal = 0.0;
      const int u = vertices[i];
      for (const auto& [v, w] : g.adj[u]) {
        const int j = pos[v];
        if (j < 0) continue;
        if (side[j] == side[i])
          internal += w;
        else
          ext += w;
      }
      gain[i] = ext - internal;
    }
  };

  std::vector<char> locked(n, 0);
  std::vector<std::size_t> moved;
  std::size_t count0 = side0_size;

  for (int pass = 0; pass < max_passes; ++pass) {
    recompute_gains();
    std::fill(locked.begin(), locked.end(), 0);
    moved.clear();
    double running = 0.0, best = 0.0;
    std::size_t best_prefix = 0;
    std::size_t cur0 = count0;

    for (std::size_t step = 0; step < n; ++step) {
      /* alternate around the target split so every prefix stays near it */
      const bool need_from0 = cur0 >= count0;
      std::size_t pick = n;
      for (std::size_t i = 0; i < n; ++i) {
        if (locked[i]) continue;
        if ((side[i] == 0) != need_from0) continue;
        if (pick == n || gain[i] > gain[pick]) pick = i;
      }
      if (pick == n) break;
      /* tentative move */
      const int u = vertices[pick];
      running += gain[pick];
      side[pick] ^= 1;
      cur0 += side[pick] == 0 ? 1 : -1;
      locked[pick] = 1;
      moved.push_back(pick);
      for (const auto& [v, w] : g.adj[u]) {
        const int j = pos[v];
        if (j < 0 || locked[j]) continue;
        gain[j] += (side[j] == side[pick]) ? -2.0 * w : 2.0 * w;
      }
      /* only prefixes restoring the original balance are acceptable */
      if (running > best + 1e-12 && cur0 == count0) {
        best = running;
        best_prefix = moved.size();
      }
    }
    /* roll back past the best prefix */
    for (std::size_t i = moved.size(); i > best_prefix; --i) {
      side[moved[i - 1]] ^= 1;
    }
    if (best <= 1e-12) break;
  }
  return side;
}

}  // namespace qcad
