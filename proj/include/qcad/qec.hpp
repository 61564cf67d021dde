#pragma once

#include <functional>
#include <vector>

#include "qcad/circuit.hpp"

namespace qcad {

/*
 * Accumulated-error labeling.  Every qubit starts at `fresh` units; a gate
 * sets each operand to 1 + max over its operands; a correction resets the
 * qubit to `base` (corrections are imperfect, so base is normally nonzero).
 */
struct EDistConfig {
  int threshold = 3;
  int base = 1;
  int fresh = 0;

  void validate() const;
};

/* A correction inserted immediately after `after_gate` on `qubit`. */
struct CorrectionPoint {
  GateId after_gate = -1;
  QubitId qubit = -1;
  auto operator<=>(const CorrectionPoint&) const = default;
};

struct CorrectionPlacement {
  std::vector<CorrectionPoint> points;  /* kept sorted */
  std::size_t size() const { return points.size(); }
  void add(GateId after_gate, QubitId qubit);
  bool contains(GateId after_gate, QubitId qubit) const;
};

struct EDistResult {
  /* count every operand carries right after each gate (the 1+max rule gives
   * all operands of a gate the same value) */
  std::vector<int> post_gate;
  int max_edist = 0;
};

/* Circuit must be flat and must not already contain correct gates. */
EDistResult compute_edist(const Circuit& c, const CorrectionPlacement& p,
                          const EDistConfig& cfg);

/*
 * Inserts the fewest corrections it can such that max EDist <= threshold.
 * Tiny circuits (<= 10 gates, <= 9 active qubits) get an exact search, so
 * the placement size is the true minimum there; larger circuits use greedy
 * forward labeling: before a gate whose post-gate count would exceed the
 * threshold, correct the operand(s) with the largest counts (ties to the
 * lowest qubit id), attaching each correction after the previous gate on
 * that qubit.  Throws std::runtime_error when no placement satisfies the
 * threshold (e.g. fresh == threshold makes a qubit's first gate violate
 * with nowhere to put a correction).
 */
CorrectionPlacement insert_corrections(const Circuit& c,
                                       const EDistConfig& cfg);

/* One correction per gate per operand. */
CorrectionPlacement every_gate_placement(const Circuit& c);

/*
 * Exhaustive minimum correction count for tiny circuits (<= 8 gates,
 * <= 6 qubits); reference for the greedy inserter.
 */
std::size_t min_corrections_oracle(const Circuit& c, const EDistConfig& cfg);

/* Materializes correct gates right after their reference points. */
Circuit apply_placement(const Circuit& c, const CorrectionPlacement& p);

enum class TuneMode {
  MaxSuccess,      /* highest evaluated success probability */
  MaxTWithin5Pct,  /* largest threshold within 95% of every-gate success */
  Budget,          /* best success with at most `budget` corrections */
};

struct TuneResult {
  int threshold = 0;  /* 0 when fell back to the every-gate baseline */
  CorrectionPlacement placement;
  double p_success = 0.0;
  double p_every_gate = -1.0;  /* -1 when the mode never evaluated it */
  bool fell_back_to_every_gate = false;
};

using SuccessEval =
    std::function<double(const Circuit&, const CorrectionPlacement&)>;

/*
 * Searches integer thresholds in [1, depth]; base/fresh come from base_cfg
 * (its threshold field is ignored).  The evaluator maps and simulates the
 * circuit under a candidate placement and returns its success probability.
 * MaxTWithin5Pct and Budget binary-search assuming success / placement size
 * are non-increasing in the threshold; MaxSuccess scans a ladder of
 * candidate thresholds and refines around the best.  When no threshold is
 * feasible the every-gate placement is returned with the warning flag set.
 */
TuneResult tune_threshold(const Circuit& c, TuneMode mode,
                          const SuccessEval& eval, const EDistConfig& base_cfg,
                          std::size_t budget = 0);

}  // namespace qcad
