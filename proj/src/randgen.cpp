#include "qcad/randgen.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "qcad/partition.hpp"
#include "qcad/rng.hpp"

namespace qcad {

void RandSpec::validate() const {
  if (gates < 0) throw std::invalid_argument("gen_random: negative gate count");
  if (qubits < 2) throw std::invalid_argument("gen_random: need >= 2 qubits");
  if (rent < 0.0 || rent > 1.0)
    throw std::invalid_argument("gen_random: rent must be in [0, 1]");
  if (two_qubit_fraction < 0.0 || two_qubit_fraction > 1.0)
    throw std::invalid_argument("gen_random: bad two-qubit fraction");
}

Circuit gen_random(const RandSpec& spec) {
  spec.validate();
  Circuit c;
  for (int i = 0; i < spec.qubits; ++i) c.add_qubit("q" + std::to_string(i));

  const int levels =
      std::max(1, static_cast<int>(std::floor(std::log2(spec.qubits))));
  /* level l = log2(subtree size); weight 2^(l*(rent-1)) */
  std::vector<double> cumulative(levels);
  double total = 0.0;
  for (int l = 1; l <= levels; ++l) {
    total += std::pow(2.0, l * (spec.rent - 1.0));
    cumulative[l - 1] = total;
  }

  static constexpr GateKind kSingle[] = {GateKind::X, GateKind::Z, GateKind::H,
                                         GateKind::S, GateKind::T};
  Rng rng(spec.seed);
  for (int i = 0; i < spec.gates; ++i) {
    if (rng.uniform() >= spec.two_qubit_fraction) {
      const auto q = static_cast<QubitId>(rng.below(spec.qubits));
      c.add_gate(kSingle[rng.below(std::size(kSingle))], {q});
      continue;
    }
    /* pick a level, then a complete subtree of size 2^level at that level */
    const double u = rng.uniform() * total;
    int level = 1;
    while (level < levels && u > cumulative[level - 1]) ++level;
    const int size = 1 << level;
    const int subtrees = spec.qubits / size;
    const int base = static_cast<int>(rng.below(subtrees)) * size;
    const int half = size / 2;
    const auto a = static_cast<QubitId>(base + rng.below(half));
    const auto b = static_cast<QubitId>(base + half + rng.below(half));
    c.add_gate(GateKind::Cnot, {a, b});
  }
  return c;
}

double measure_rent(const Circuit& flat) {
  if (flat.qubits.size() < 64)
    throw std::invalid_argument(
        "measure_rent: need >= 64 qubits for a 3-level fit");
  const InteractionGraph g = InteractionGraph::from_circuit(flat);

  std::vector<std::vector<int>> blocks(1);
  blocks[0].resize(g.n);
  for (int i = 0; i < g.n; ++i) blocks[0][i] = i;

  std::vector<double> log_size, log_ext;
  /* level 0 has no external wires; start recording after the first cut */
  while (true) {
    std::vector<std::vector<int>> next;
    for (const auto& block : blocks) {
      const std::size_t half = block.size() / 2;
      auto side = fm_bisect(g, block, half);
      std::vector<int> lo, hi;
      for (std::size_t i = 0; i < block.size(); ++i)
        (side[i] == 0 ? lo : hi).push_back(block[i]);
      next.push_back(std::move(lo));
      next.push_back(std::move(hi));
    }
    blocks = std::move(next);

    double mean_ext = 0.0, mean_size = 0.0;
    for (const auto& block : blocks) {
      mean_ext += external_weight(g, block);
      mean_size += static_cast<double>(block.size());
    }
    mean_ext /= static_cast<double>(blocks.size());
    mean_size /= static_cast<double>(blocks.size());
    /* blocks with no external wiring still need a finite point */
    log_size.push_back(std::log2(mean_size));
    log_ext.push_back(std::log2(std::max(mean_ext, 0.5)));

    if (blocks[0].size() / 2 < 4 || log_size.size() >= 6) break;
  }
  if (log_size.size() < 3)
    throw std::invalid_argument("measure_rent: circuit too small to fit");

  /* least squares slope of log T over log s */
  const auto n = static_cast<double>(log_size.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < log_size.size(); ++i) {
    sx += log_size[i];
    sy += log_ext[i];
    sxx += log_size[i] * log_size[i];
    sxy += log_size[i] * log_ext[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace qcad
