#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qcad/circuit.hpp"
#include "qcad/datapath.hpp"
#include "qcad/errorsim.hpp"
#include "qcad/mapper.hpp"
#include "qcad/metrics.hpp"
#include "qcad/tech.hpp"

namespace qcad {

/* One layout point taken through the whole flow: partition, schedule, size
 * ancilla generation (qalypso) and the network, re-schedule against the
 * provisioned routers, then simulate and measure. */
struct EvalResult {
  DatapathConfig config;
  RegionLayout layout;
  Assignment assignment;
  MappedSchedule schedule;
  NetworkSizing network;
  McResult mc;
  Metrics metrics;
};

EvalResult evaluate_config(const Circuit& c, const DatapathConfig& cfg,
                           const TechModel& tech, std::size_t trials,
                           std::uint64_t seed, double aggressiveness = 1.0);

/* Axes of the configuration sweep.  Empty D falls back to the template's
 * region count; empty M uses each kind's preset default. */
struct SweepSpec {
  std::vector<int> data_regions;
  std::vector<int> memory_regions;
  std::vector<double> aggressiveness = {1.0};
};

struct SweepPoint {
  DatapathConfig config;
  double aggressiveness = 1.0;
  bool mapped = false;
  std::string error; /* why the point failed, when it did */
  Metrics metrics;
  double makespan_us = 0.0;
  std::size_t teleports = 0;
  double stall_us = 0.0;
};

struct SearchResult {
  EvalResult best;
  std::size_t best_index = 0;      /* into points */
  std::vector<SweepPoint> points;  /* full table, sweep order */
};

/*
 * Evaluates every (D, M, aggressiveness) point and keeps the one with the
 * lowest ADCR (first wins ties).  Points that fail to map stay in the table
 * with their error; if every point fails, throws MapError.
 */
SearchResult adcr_search(const Circuit& c, const DatapathConfig& tmpl,
                         const SweepSpec& sweep, const TechModel& tech,
                         std::size_t trials, std::uint64_t seed);

/* emit_report-style sweep table: one CSV row per point. */
std::string sweep_csv(const SearchResult& r);

/* Everything that determines a run's outputs; the hash of its canonical
 * JSON (minus timestamp) is embedded in every artifact so reruns can be
 * checked byte-for-byte. */
struct RunManifest {
  std::string version = "0.1.0";
  std::string command;
  std::string input;     /* netlist path or generator spec */
  std::string tech_file; /* empty = built-in defaults */
  int error_set = 1;
  std::string datapath;
  std::string qec_mode; /* "every-gate", "edist:N", "auto-5pct", "budget:N" */
  std::string sweep;    /* human-readable sweep ranges */
  std::size_t trials = 0;
  std::uint64_t seed = 0;
  std::string out_dir;

  std::string to_json() const; /* canonical: sorted keys, no timestamp */
  std::uint64_t hash() const;  /* FNV-1a over to_json() */
};

std::uint64_t fnv1a(std::string_view bytes);

}  // namespace qcad
