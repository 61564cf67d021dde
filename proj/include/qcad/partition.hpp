#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "qcad/circuit.hpp"

namespace qcad {

/* Weighted qubit interaction graph; weight = number of shared 2-qubit ops. */
struct InteractionGraph {
  int n = 0;
  std::vector<std::vector<std::pair<int, double>>> adj;

  static InteractionGraph from_circuit(const Circuit& flat);
  double total_weight() const;
};

/*
 * Deterministic Fiduccia-Mattheyses style bisection of the given vertex
 * subset.  side0_size vertices go to side 0, the rest to side 1.  Returns a
 * 0/1 label per position in `vertices`.
 */
std::vector<int> fm_bisect(const InteractionGraph& g,
                           std::span<const int> vertices,
                           std::size_t side0_size, int max_passes = 8);

/* Edge weight crossing the labelled split of `vertices`. */
double cut_weight(const InteractionGraph& g, std::span<const int> vertices,
                  std::span<const int> side);

/* Weight of edges from `inside` to anywhere outside it. */
double external_weight(const InteractionGraph& g, std::span<const int> inside);

}  // namespace qcad
