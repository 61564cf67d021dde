#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "qcad/circuit.hpp"
#include "qcad/datapath.hpp"

namespace qcad {

/* Scheduling failed; time_us is the blocked timestep. */
struct MapError : std::runtime_error {
  double time_us;
  MapError(const std::string& msg, double t)
      : std::runtime_error(msg), time_us(t) {}
};

struct Assignment {
  std::vector<int> region_of;  /* home region per qubit */
  std::size_t cut_weight = 0;  /* interaction weight crossing regions */
};

/*
 * Recursive capacity-weighted bisection of the interaction graph onto the
 * region grid (data regions fill first, overflow parks in memory).
 * Throws std::invalid_argument when total capacity < qubit count.
 */
Assignment partition(const Circuit& c, const RegionLayout& layout);

struct GatePlacement {
  int region = -1;
  double start_us = 0.0;
  double duration_us = 0.0;
};

struct Relocation {
  QubitId qubit = -1;
  int from = -1;
  int to = -1;
  double depart_us = 0.0;
  double arrive_us = 0.0;
};

/* Maintenance correction on a qubit parked in memory. */
struct IdleCorrection {
  QubitId qubit = -1;
  int region = -1;
  double time_us = 0.0;
};

struct Dwell {
  int region = -1;
  double from_us = 0.0;
  double to_us = 0.0;
};

struct DemandEvent {
  double time_us = 0.0;
  double blocks = 0.0;
};

struct LoadEvent {
  double time_us = 0.0;
  int delta = 0;
};

struct MappedSchedule {
  std::vector<GatePlacement> gates;  /* indexed by gate id */
  std::vector<Relocation> relocations;
  std::vector<IdleCorrection> idle_corrections;
  std::vector<std::vector<Dwell>> qubit_timeline;    /* per qubit */
  std::vector<std::vector<DemandEvent>> zero_demand; /* per region */
  std::vector<std::vector<DemandEvent>> t_demand;    /* per region */
  std::vector<std::vector<LoadEvent>> router_load;   /* per region */
  double makespan_us = 0.0;
  double ancilla_stall_us = 0.0;
  std::size_t cut_weight = 0;
  std::size_t teleport_count = 0;
};

struct NetworkSizing {
  std::vector<int> peak_load;   /* observed concurrent connections */
  std::vector<int> provisioned; /* built capacity after aggressiveness */
  double aggressiveness = 1.0;

  double extra_router_area_mb(const RegionLayout& lay) const;
};

/*
 * Event-driven list scheduling: among ready gates the one that can start
 * soonest dispatches first (critical-path weight breaks ties, then gate id).
 * Gates run as late as their operands allow, operands teleport between
 * regions just in time, long-idle qubits park in memory, and fixed-ancilla
 * datapaths stall on factory tokens while qalypso only logs demand.  When
 * `provision` is given, teleports crossing saturated routers pay one
 * EPR-generation latency per saturated hop.
 */
MappedSchedule schedule(const Circuit& c, const RegionLayout& layout,
                        const Assignment& asg,
                        const NetworkSizing* provision = nullptr);

/*
 * Resizes per-region generator counts from observed demand: generators =
 * ceil(peak blocks per factory-latency window / blocks one generator makes
 * per window).  Qalypso only.
 */
RegionLayout size_ancilla(const MappedSchedule& s, const RegionLayout& layout);

NetworkSizing size_network(const MappedSchedule& s, const RegionLayout& layout,
                           double aggressiveness = 1.0);

/* Returns human-readable violations; empty means the schedule is sound. */
std::vector<std::string> validate_schedule(const MappedSchedule& s,
                                           const Circuit& c,
                                           const RegionLayout& layout);

}  // namespace qcad
