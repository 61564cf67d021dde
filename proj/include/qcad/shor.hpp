#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "qcad/adders.hpp"
#include "qcad/datapath.hpp"
#include "qcad/tech.hpp"

namespace qcad {

enum class QecMode { EveryGate, Optimized };

struct ShorSpec {
  int n = 16;        /* bits of the number being factored */
  AdderSpec adder;   /* kernel adder; its width is overridden to n */
  QecMode qec = QecMode::EveryGate;
  int threshold = 3; /* accumulation threshold when qec == Optimized */

  void validate() const; /* n >= 4 and a power of two */
};

/*
 * Resource estimate for order finding: 2n controlled modular
 * multiplications, each of n controlled modular additions, each of 5 adder
 * calls (the Vedral modular-arithmetic construction) plus a 4n+4-op
 * comparator/reset overhead per modular addition, and a banded QFT on the
 * 2n-bit exponent register.  Correction counts come from the real placement
 * on one adder kernel, applied as a density to the remaining gates.
 */
struct ShorEstimate {
  ShorSpec spec;

  std::int64_t ctrl_mod_mults = 0; /* 2n */
  std::int64_t mod_adds = 0;       /* 2n * n */
  std::int64_t adder_calls = 0;    /* 10 n^2 */

  std::int64_t adder_gates = 0;     /* logical gates in one adder call */
  std::size_t adder_depth = 0;      /* logical depth of one adder call */
  std::size_t adder_qubits = 0;
  std::int64_t adder_corrections = 0;
  double correction_density = 0.0;  /* corrections per logical gate */

  std::int64_t logical[kGateKindCount] = {}; /* whole algorithm, no Corrects */
  std::int64_t logical_total = 0;
  std::int64_t qft_logical = 0;
  std::int64_t corrections = 0;

  std::int64_t physical_ops = 0; /* via cost table, incl. correction blocks */
  std::int64_t qft_physical = 0;
  double qft_share = 0.0;
};

ShorEstimate gen_shor(const ShorSpec& spec,
                      const GateCostTable& costs = GateCostTable::steane_defaults());

/*
 * One sweep row: adder kernels up to `full_map_limit` bits are laid out and
 * scheduled on the given datapath family; larger widths scale the mapped
 * reference by corrected-depth (latency) and working-set (area) ratios.
 */
struct ShorSweepRow {
  ShorEstimate est;
  bool mapped = false;
  double adder_latency_us = 0.0;
  double latency_us = 0.0;
  double area_mb = 0.0;
  double area_mm2 = 0.0;
};

std::vector<ShorSweepRow> shor_sweep(std::span<const int> ns,
                                     const ShorSpec& base,
                                     const TechModel& tech,
                                     const DatapathConfig& datapath,
                                     int full_map_limit = 64);

}  // namespace qcad
