#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "qcad/tech.hpp"

namespace qcad {

enum class DatapathKind { Qla, Lqla, Cqla, CqlaPlus, Qalypso };

std::string_view datapath_name(DatapathKind k);
std::optional<DatapathKind> datapath_from_name(std::string_view name);

enum class TGatePolicy { Anywhere, DesignatedSites };

/*
 * Region-level organization of the machine.  The fixed organizations pin
 * their per-region capacities and generator counts; qalypso leaves them
 * free (the mapper sizes generators from observed demand).
 */
struct DatapathConfig {
  DatapathKind kind = DatapathKind::Qla;
  int data_regions = 1;    /* D */
  int memory_regions = 0;  /* M */
  int data_capacity = 2;   /* Dq, logical qubits per data region */
  int data_generators = 2; /* Dag */
  int memory_capacity = 0;   /* Mq */
  int memory_generators = 0; /* Mag */
  FactoryKind factory = FactoryKind::QlaBasic;
  TGatePolicy policy = TGatePolicy::Anywhere;
  int t_site_stride = 4; /* designated-sites: every Nth data region */

  /* Fills per-kind defaults; M < 0 picks the kind's default count. */
  static DatapathConfig preset(DatapathKind kind, int data_regions,
                               int memory_regions = -1);
  void validate() const;
};

enum class RegionType { Data, Memory };

struct Region {
  RegionType type = RegionType::Data;
  int row = 0;
  int col = 0;
  int capacity = 0;    /* logical qubit slots */
  int generators = 0;  /* zero-ancilla factories */
  int t_factories = 0; /* scaled T-state factories at designated sites */
  bool t_site = false; /* non-transversal gates may run here */
};

/*
 * Row-major square-ish grid of regions (data regions first), uniform cells
 * separated by movement channels, one router per region.
 */
struct RegionLayout {
  DatapathConfig config;
  TechModel tech;
  std::vector<Region> regions;
  int grid_rows = 0;
  int grid_cols = 0;
  int cell_side_mb = 0;

  std::size_t size() const { return regions.size(); }
  int region_at(int row, int col) const; /* -1 when the cell is empty */

  double region_area_mb(std::size_t i) const;
  double channel_area_mb() const;
  /* Sum of region areas plus channel strips (base routers, before sizing). */
  double total_area_mb() const;

  /* XY-route geometry between region centers, in macroblocks. */
  int route_straights(std::size_t a, std::size_t b) const;
  int route_turns(std::size_t a, std::size_t b) const;
  int intra_region_straights() const;

  std::vector<std::size_t> t_site_regions() const;
  std::size_t total_capacity() const;
};

/* Throws std::invalid_argument on capacity/kind mismatches. */
RegionLayout instantiate(const DatapathConfig& cfg, const TechModel& tech);

/*
 * Smallest preset of the family whose capacity holds `qubits` plus one slot
 * of slack, so residents can always shuffle aside when operands must be
 * brought together.
 */
DatapathConfig fit_datapath(DatapathKind kind, std::size_t qubits,
                            const TechModel& tech);

}  // namespace qcad
