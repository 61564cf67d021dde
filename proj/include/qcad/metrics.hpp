#pragma once

#include <span>
#include <string>
#include <string_view>

#include "qcad/datapath.hpp"
#include "qcad/errorsim.hpp"
#include "qcad/mapper.hpp"

namespace qcad {

/*
 * Area x expected latency to first success.  Retries are independent, so
 * the expected total latency is the geometric series sum latency/p.
 * p_success = 0 yields +infinity; p outside [0, 1] is rejected.
 */
double adcr(double area, double latency_single, double p_success);

/* Absolute macroblock areas by component; total() matches machine area. */
struct AreaBreakdown {
  double data = 0.0;    /* data-region slots and their routers */
  double memory = 0.0;  /* memory-region slots and their routers */
  double qec = 0.0;     /* zero-ancilla generators, all regions */
  double t = 0.0;       /* T-state factories */
  double network = 0.0; /* channel strips + provisioned router capacity */

  double total() const { return data + memory + qec + t + network; }
};

struct Metrics {
  std::string config;
  double area_mb = 0.0;
  double area_mm2 = 0.0;
  double latency_us = 0.0;
  double p_success = 1.0;
  double ci_low = 0.0;
  double ci_high = 1.0;
  double adcr_mm2_us = 0.0; /* area_mm2 * latency_us / p_success */
  AreaBreakdown breakdown;  /* macroblocks; sums to area_mb */

  double share(double part) const { return area_mb > 0 ? part / area_mb : 0; }
};

/*
 * Area from the layout (+ extra provisioned router capacity when `net` is
 * given), latency from the schedule makespan, success from the simulation.
 */
Metrics measure(const MappedSchedule& s, const RegionLayout& layout,
                const McResult& sim, const NetworkSizing* net = nullptr,
                std::string_view config = "");

/* format is "json" (object / array) or "csv" (fixed header + rows). */
std::string emit_report(const Metrics& m, std::string_view format);
std::string emit_report(std::span<const Metrics> rows, std::string_view format);

}  // namespace qcad
