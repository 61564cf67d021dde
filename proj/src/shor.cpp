#include "qcad/shor.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>

#include "qcad/mapper.hpp"
#include "qcad/qec.hpp"

namespace qcad {

void ShorSpec::validate() const {
  if (n < 4) throw std::invalid_argument("shor width must be >= 4");
  if ((n & (n - 1)) != 0)
    throw std::invalid_argument("shor width must be a power of two");
  if (qec == QecMode::Optimized && threshold < 2)
    throw std::invalid_argument("optimized qec needs threshold >= 2");
}

namespace {

AdderSpec kernel_spec(const ShorSpec& spec) {
  AdderSpec a = spec.adder;
  a.n = spec.n;
  a.m = std::min(a.m, a.n);
  a.validate();
  return a;
}

CorrectionPlacement kernel_placement(const ShorSpec& spec, const Circuit& c) {
  if (spec.qec == QecMode::EveryGate) return every_gate_placement(c);
  EDistConfig cfg;
  cfg.threshold = spec.threshold;
  return insert_corrections(c, cfg);
}

}  // namespace

ShorEstimate gen_shor(const ShorSpec& spec, const GateCostTable& costs) {
  spec.validate();
  ShorEstimate est;
  est.spec = spec;
  const std::int64_t n = spec.n;
  est.ctrl_mod_mults = 2 * n;
  est.mod_adds = est.ctrl_mod_mults * n;
  est.adder_calls = est.mod_adds * 5;

  const AdderCircuit ac = gen_adder(kernel_spec(spec));
  est.adder_depth = ac.circuit.depth();
  est.adder_qubits = ac.circuit.qubits.size();
  est.adder_gates = static_cast<std::int64_t>(ac.circuit.gates.size());

  std::int64_t adder_kind[kGateKindCount] = {};
  for (const Gate& g : ac.circuit.gates)
    ++adder_kind[static_cast<int>(g.kind)];

  const CorrectionPlacement pl = kernel_placement(spec, ac.circuit);
  est.adder_corrections = static_cast<std::int64_t>(pl.size());
  est.correction_density =
      est.adder_gates > 0
          ? static_cast<double>(est.adder_corrections) /
                static_cast<double>(est.adder_gates)
          : 0.0;

  for (int k = 0; k < kGateKindCount; ++k)
    est.logical[k] = adder_kind[k] * est.adder_calls;
  /* comparator / overflow-reset ops around each modular addition */
  est.logical[static_cast<int>(GateKind::X)] += (2 * n + 2) * est.mod_adds;
  est.logical[static_cast<int>(GateKind::Cnot)] += (2 * n + 2) * est.mod_adds;
  /* banded QFT on the 2n-bit exponent register; each kept controlled
   * rotation costs one CNOT and two T gates */
  const int qft_bits = static_cast<int>(2 * n);
  const int band =
      static_cast<int>(std::ceil(std::log2(static_cast<double>(qft_bits)))) + 2;
  std::int64_t rotations = 0;
  for (int i = 0; i < qft_bits; ++i)
    rotations += std::min(band, qft_bits - 1 - i);
  est.logical[static_cast<int>(GateKind::H)] += qft_bits;
  est.logical[static_cast<int>(GateKind::Cnot)] += rotations;
  est.logical[static_cast<int>(GateKind::T)] += 2 * rotations;
  est.qft_logical = qft_bits + 3 * rotations;

  est.logical_total = 0;
  for (int k = 0; k < kGateKindCount; ++k) est.logical_total += est.logical[k];
  est.corrections = std::llround(est.correction_density *
                                 static_cast<double>(est.logical_total));

  est.physical_ops = 0;
  for (int k = 0; k < kGateKindCount; ++k)
    est.physical_ops +=
        est.logical[k] * costs.cost(static_cast<GateKind>(k)).total();
  est.physical_ops += est.corrections * costs.correction_total_ops();

  est.qft_physical =
      qft_bits * costs.cost(GateKind::H).total() +
      rotations * costs.cost(GateKind::Cnot).total() +
      2 * rotations * costs.cost(GateKind::T).total() +
      std::llround(est.correction_density * static_cast<double>(est.qft_logical)) *
          costs.correction_total_ops();
  est.qft_share = est.physical_ops > 0
                      ? static_cast<double>(est.qft_physical) /
                            static_cast<double>(est.physical_ops)
                      : 0.0;
  return est;
}

namespace {

struct MappedKernel {
  double latency_us = 0.0;
  double area_mb = 0.0;
  std::size_t corrected_depth = 0;
  std::size_t qubits = 0;
};

MappedKernel map_kernel(const ShorSpec& spec, const TechModel& tech,
                        DatapathKind kind) {
  const AdderCircuit ac = gen_adder(kernel_spec(spec));
  const CorrectionPlacement pl = kernel_placement(spec, ac.circuit);
  /* Toffolis run as their two-qubit decomposition on the machine */
  const Circuit corrected = decompose_toffoli(apply_placement(ac.circuit, pl));

  MappedKernel k;
  k.corrected_depth = corrected.depth();
  k.qubits = corrected.qubits.size();

  const DatapathConfig cfg = fit_datapath(kind, k.qubits, tech);
  RegionLayout lay = instantiate(cfg, tech);
  const Assignment asg = partition(corrected, lay);
  MappedSchedule sched = schedule(corrected, lay, asg);
  if (cfg.kind == DatapathKind::Qalypso) {
    lay = size_ancilla(sched, lay);
    sched = schedule(corrected, lay, asg);
  }
  const NetworkSizing net = size_network(sched, lay);
  sched = schedule(corrected, lay, asg, &net);

  k.latency_us = sched.makespan_us;
  k.area_mb = lay.total_area_mb() + net.extra_router_area_mb(lay);
  return k;
}

/* Only the depth/size of the corrected kernel, no layout work. */
MappedKernel unmapped_kernel(const ShorSpec& spec) {
  const AdderCircuit ac = gen_adder(kernel_spec(spec));
  const CorrectionPlacement pl = kernel_placement(spec, ac.circuit);
  const Circuit corrected = decompose_toffoli(apply_placement(ac.circuit, pl));
  MappedKernel k;
  k.corrected_depth = corrected.depth();
  k.qubits = corrected.qubits.size();
  return k;
}

}  // namespace

std::vector<ShorSweepRow> shor_sweep(std::span<const int> ns,
                                     const ShorSpec& base,
                                     const TechModel& tech,
                                     const DatapathConfig& datapath,
                                     int full_map_limit) {
  int ref_n = 4;
  while (ref_n * 2 <= full_map_limit) ref_n *= 2;
  if (full_map_limit < 4)
    throw std::invalid_argument("full_map_limit must allow a 4-bit kernel");

  std::optional<MappedKernel> ref;
  std::vector<ShorSweepRow> rows;
  rows.reserve(ns.size());
  for (int n : ns) {
    ShorSpec spec = base;
    spec.n = n;
    ShorSweepRow row;
    row.est = gen_shor(spec, tech.costs);

    MappedKernel kernel;
    if (n <= full_map_limit) {
      kernel = map_kernel(spec, tech, datapath.kind);
      row.mapped = true;
    } else {
      if (!ref) {
        ShorSpec ref_spec = base;
        ref_spec.n = ref_n;
        ref = map_kernel(ref_spec, tech, datapath.kind);
      }
      const MappedKernel shape = unmapped_kernel(spec);
      kernel.corrected_depth = shape.corrected_depth;
      kernel.qubits = shape.qubits;
      kernel.latency_us = ref->latency_us *
                          static_cast<double>(shape.corrected_depth) /
                          static_cast<double>(ref->corrected_depth);
      kernel.area_mb = ref->area_mb * static_cast<double>(shape.qubits) /
                       static_cast<double>(ref->qubits);
    }

    row.adder_latency_us = kernel.latency_us;
    const double bundle = tech.costs.average_gate_bundle_us(tech.errors);
    const double overhead_us =
        static_cast<double>(4 * n + 4) *
        static_cast<double>(row.est.mod_adds) * bundle;
    const double qft_us = static_cast<double>(row.est.qft_logical) * bundle;
    row.latency_us =
        kernel.latency_us * static_cast<double>(row.est.adder_calls) +
        overhead_us + qft_us;
    /* the exponent and modulus registers ride along with the adder */
    const double working_set =
        (static_cast<double>(kernel.qubits) + 4.0 * n) /
        static_cast<double>(kernel.qubits);
    row.area_mb = kernel.area_mb * working_set;
    row.area_mm2 = tech.area_mm2(row.area_mb);
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace qcad
