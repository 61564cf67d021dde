#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "qcad/circuit.hpp"

namespace qcad {

struct OpPhysics {
  double p_fail = 0.0;
  double latency_us = 0.0;
};

/*
 * Physical error/latency parameters of the trap substrate.  Two stock
 * parameter sets are provided; either can be overridden from a tech file.
 */
struct ErrorSet {
  OpPhysics one_qubit{1e-6, 1.0};
  OpPhysics two_qubit{1e-6, 10.0};
  OpPhysics measure{1e-6, 50.0};
  OpPhysics prep{1e-6, 51.0};
  OpPhysics move_straight{1e-8, 1.0};
  OpPhysics move_turn{1e-8, 10.0};
  double idle_rate_per_us = 1e-10;

  static ErrorSet set1();
  static ErrorSet set2();
  static ErrorSet by_index(int index);  /* 1 or 2 */
};

struct PhysOpCounts {
  std::int64_t one_qubit = 0;
  std::int64_t two_qubit = 0;
  std::int64_t prep = 0;
  std::int64_t measure = 0;
  std::int64_t total() const { return one_qubit + two_qubit + prep + measure; }
  PhysOpCounts& operator+=(const PhysOpCounts& o);
  PhysOpCounts scaled(std::int64_t k) const;
};

/*
 * Physical expansion of logical operations under one level of the 7-qubit
 * code with transversal gates.  The correction entry covers the data-side
 * interactions with two encoded |0> blocks; generator-internal work is kept
 * as a separate scalar so op totals match the calibrated per-correction
 * budget without polluting the data error trace.
 */
struct GateCostTable {
  PhysOpCounts per_kind[kGateKindCount];
  std::int64_t correction_factory_ops = 3004;
  int correction_zero_blocks = 2;
  PhysOpCounts teleport{14, 14, 14, 14};

  static GateCostTable steane_defaults();

  PhysOpCounts cost(GateKind k) const;
  std::int64_t correction_total_ops() const;  /* data side + factory side */
  /* Wall-clock duration of one logical gate bundle. */
  double logical_duration_us(GateKind k, const ErrorSet& es) const;
  double teleport_duration_us(const ErrorSet& es) const;
  double average_gate_bundle_us(const ErrorSet& es) const;
};

double physical_cost_total(const Circuit& flat, const GateCostTable& t);

enum class FactoryKind { QlaBasic, LqlaOptimized, QalypsoPipelined };

struct AncillaFactory {
  FactoryKind kind = FactoryKind::QlaBasic;
  double area_mb = 49.0;
  double latency_us = 60.0;
  double throughput_blocks_per_us = 1.0 / 60.0;
  double infidelity_factor = 10.0;  /* x gate error */
  bool pipelined = false;

  double output_infidelity(const ErrorSet& es) const {
    return infidelity_factor * es.two_qubit.p_fail;
  }
  static AncillaFactory make(FactoryKind kind);
};

struct RouterModel {
  double base_area_mb = 49.0;
  double area_per_load_mb = 16.0;
  int purify_rounds = 1;
  double epr_base_fidelity = 0.98;
  double epr_gen_latency_us = 61.0;
};

/* One round maps F -> F^2 / (F^2 + (1-F)^2); requires F > 0.5. */
double purify(double fidelity, int rounds);

struct ChannelResult {
  double probability = 0.0;
  double latency_us = 0.0;
};

/*
 * Combined failure probability and transport latency of a ballistic channel
 * with the given straight segments, turns, and idle dwell.
 */
ChannelResult channel_errors(int straights, int turns, double idle_us,
                             const ErrorSet& es);

struct TechModel {
  ErrorSet errors;
  int error_set_index = 1;
  GateCostTable costs;
  RouterModel router;

  double macroblock_pitch_um = 90.0;
  double slot_area_mb = 81.0;  /* 7 physical sites in 3x3 cells + access */
  double channel_width_mb = 1.0;

  /* T-state factories relative to the zero-ancilla generator. */
  double t_factory_area_mult = 4.0;
  double t_factory_latency_mult = 4.0;
  double t_factory_infidelity_mult = 2.0;

  /* mapping policy constants */
  double idle_relocate_multiple = 4.0;
  double factory_buffer_depth = 2.0;
  double qla_element_area_mb = 309.0;  /* 2 slots + 2 gens + router */

  double area_mm2(double area_mb) const {
    const double mm = macroblock_pitch_um / 1000.0;
    return area_mb * mm * mm;
  }
  double idle_correction_interval_us() const {
    return errors.two_qubit.p_fail / errors.idle_rate_per_us;
  }

  static TechModel defaults(int error_set_index);
  /* Applies "key = value" overrides; unknown keys are an error. */
  void apply_overrides(std::string_view text);
  static TechModel from_file(const std::string& path, int error_set_index);
};

}  // namespace qcad
