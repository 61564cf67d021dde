#pragma once

#include <cstdint>
#include <vector>

#include "qcad/circuit.hpp"
#include "qcad/datapath.hpp"
#include "qcad/mapper.hpp"
#include "qcad/qec.hpp"

namespace qcad {

enum class ErrorKind : std::uint8_t {
  Gate,
  Move,
  Idle,
  TeleportChannel,
  BallisticChannel,
};

/*
 * One entry of the dataflow-ordered error list.  Events are Bernoulli error
 * sources (multiplicity counts identical independent slots, e.g. the 7
 * physical gates of one transversal op or N µs of idling).  Merges copy
 * accumulated-error state across the operands of a multi-qubit gate, the
 * worst case of error propagation and the same rule the accumulation model
 * uses.  Markers close a syndrome window after a correction.
 */
struct TraceOp {
  enum class Kind : std::uint8_t { Event, Merge, Marker };
  Kind kind = Kind::Event;
  ErrorKind error = ErrorKind::Gate;
  QubitId q[3] = {-1, -1, -1};
  std::uint8_t nq = 0;
  double p = 0.0;
  std::int64_t multiplicity = 1;
  double time_us = 0.0;
};

struct ErrorTrace {
  std::vector<TraceOp> ops;
  std::size_t num_qubits = 0;

  void add_event(std::initializer_list<QubitId> qs, double p,
                 std::int64_t multiplicity, ErrorKind kind = ErrorKind::Gate,
                 double time_us = 0.0);
  void add_merge(QubitId a, QubitId b, double time_us = 0.0);
  void add_marker(QubitId q, double time_us = 0.0);

  std::int64_t event_count() const; /* total Bernoulli slots */
  std::size_t marker_count() const;
};

/* Expands a mapped schedule into the error list (layout.tech supplies the
 * cost table, factories, and router fidelity). */
ErrorTrace build_error_trace(const Circuit& c, const MappedSchedule& s,
                             const RegionLayout& layout);

struct McResult {
  double p_success = 1.0;
  double ci_low = 0.0;
  double ci_high = 1.0;
  std::uint64_t successes = 0;
  std::uint64_t trials = 0;
  /* sampled Pauli kinds of fired events, for diagnostics */
  std::uint64_t x_errors = 0;
  std::uint64_t z_errors = 0;
  std::uint64_t both_errors = 0;
};

/*
 * Samples each event binomially over its multiplicity; a qubit whose
 * syndrome window accumulates two firings fails the trial (distance-3
 * limit), with merges spreading accumulated state.  Per-trial substreams
 * are derived from (seed, trial index), so any thread count produces the
 * identical success count.
 */
McResult mc_run(const ErrorTrace& t, std::uint64_t trials, std::uint64_t seed,
                int threads = 1);

/* apply placement -> instantiate -> partition -> schedule -> trace -> mc */
double mapped_success(const Circuit& c, const CorrectionPlacement& placement,
                      const DatapathConfig& cfg, const TechModel& tech,
                      std::uint64_t trials, std::uint64_t seed);

SuccessEval make_success_eval(const DatapathConfig& cfg, const TechModel& tech,
                              std::uint64_t trials, std::uint64_t seed);

}  // namespace qcad
