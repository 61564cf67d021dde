#include "qcad/datapath.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace qcad {

std::string_view datapath_name(DatapathKind k) {
  switch (k) {
    case DatapathKind::Qla: return "qla";
    case DatapathKind::Lqla: return "lqla";
    case DatapathKind::Cqla: return "cqla";
    case DatapathKind::CqlaPlus: return "cqla+";
    case DatapathKind::Qalypso: return "qalypso";
  }
  return "?";
}

std::optional<DatapathKind> datapath_from_name(std::string_view name) {
  if (name == "qla") return DatapathKind::Qla;
  if (name == "lqla") return DatapathKind::Lqla;
  if (name == "cqla") return DatapathKind::Cqla;
  if (name == "cqla+" || name == "cqlaplus") return DatapathKind::CqlaPlus;
  if (name == "qalypso") return DatapathKind::Qalypso;
  return std::nullopt;
}

DatapathConfig DatapathConfig::preset(DatapathKind kind, int data_regions,
                                      int memory_regions) {
  DatapathConfig c;
  c.kind = kind;
  c.data_regions = data_regions;
  switch (kind) {
    case DatapathKind::Qla:
    case DatapathKind::Lqla:
      c.memory_regions = 0;
      c.data_capacity = 2;
      c.data_generators = 2;
      c.memory_capacity = 0;
      c.memory_generators = 0;
      c.factory = kind == DatapathKind::Qla ? FactoryKind::QlaBasic
                                            : FactoryKind::LqlaOptimized;
      c.policy = TGatePolicy::Anywhere;
      break;
    case DatapathKind::Cqla:
    case DatapathKind::CqlaPlus:
      c.memory_regions = memory_regions < 0 ? data_regions : memory_regions;
      c.data_capacity = 36;
      c.data_generators = 36;
      c.memory_capacity = kind == DatapathKind::Cqla ? 64 : 96;
      c.memory_generators = kind == DatapathKind::Cqla ? 8 : 12;
      c.factory = kind == DatapathKind::Cqla ? FactoryKind::QlaBasic
                                             : FactoryKind::QalypsoPipelined;
      c.policy = TGatePolicy::Anywhere;
      break;
    case DatapathKind::Qalypso:
      c.memory_regions =
          memory_regions < 0 ? std::max(1, data_regions / 4) : memory_regions;
      c.data_capacity = 16;
      c.data_generators = 4;
      c.memory_capacity = 64;
      c.memory_generators = 2;
      c.factory = FactoryKind::QalypsoPipelined;
      c.policy = TGatePolicy::DesignatedSites;
      break;
  }
  return c;
}

void DatapathConfig::validate() const {
  auto fail = [&](const std::string& what) {
    throw std::invalid_argument(std::string(datapath_name(kind)) +
                                " datapath: " + what);
  };
  if (data_regions < 1) fail("needs at least one data region");
  if (memory_regions < 0) fail("negative memory region count");
  switch (kind) {
    case DatapathKind::Qla:
    case DatapathKind::Lqla:
      if (memory_regions != 0) fail("has no memory regions");
      if (data_capacity != 2 || data_generators != 2)
        fail("elements hold exactly 2 qubits and 2 generators");
      if (policy != TGatePolicy::Anywhere)
        fail("runs non-transversal gates anywhere");
      if (factory != (kind == DatapathKind::Qla ? FactoryKind::QlaBasic
                                                : FactoryKind::LqlaOptimized))
        fail("factory kind mismatch");
      break;
    case DatapathKind::Cqla:
    case DatapathKind::CqlaPlus: {
      if (data_capacity != 36 || data_generators != 36)
        fail("data regions are fixed at 36 qubits / 36 generators");
      int mq = kind == DatapathKind::Cqla ? 64 : 96;
      int mag = kind == DatapathKind::Cqla ? 8 : 12;
      if (memory_regions > 0 && (memory_capacity != mq ||
                                 memory_generators != mag))
        fail("memory regions are fixed at " + std::to_string(mq) +
             " qubits / " + std::to_string(mag) + " generators");
      if (policy != TGatePolicy::Anywhere)
        fail("runs non-transversal gates anywhere");
      break;
    }
    case DatapathKind::Qalypso:
      if (data_capacity < 1) fail("data capacity must be positive");
      if (data_generators < 0 || memory_generators < 0)
        fail("negative generator count");
      if (memory_regions > 0 && memory_capacity < 1)
        fail("memory capacity must be positive");
      if (policy != TGatePolicy::DesignatedSites)
        fail("restricts non-transversal gates to designated sites");
      if (t_site_stride < 1) fail("t-site stride must be positive");
      break;
  }
}

RegionLayout instantiate(const DatapathConfig& cfg, const TechModel& tech) {
  cfg.validate();
  RegionLayout lay;
  lay.config = cfg;
  lay.tech = tech;

  int n = cfg.data_regions + cfg.memory_regions;
  lay.grid_cols = static_cast<int>(std::ceil(std::sqrt(double(n))));
  lay.grid_rows = (n + lay.grid_cols - 1) / lay.grid_cols;

  for (int i = 0; i < n; ++i) {
    Region r;
    r.row = i / lay.grid_cols;
    r.col = i % lay.grid_cols;
    if (i < cfg.data_regions) {
      r.type = RegionType::Data;
      r.capacity = cfg.data_capacity;
      r.generators = cfg.data_generators;
      if (cfg.policy == TGatePolicy::Anywhere) {
        r.t_site = true; /* generic generators serve T state needs */
      } else if (i % cfg.t_site_stride == 0) {
        r.t_site = true;
        r.t_factories = 1;
      }
    } else {
      r.type = RegionType::Memory;
      r.capacity = cfg.memory_capacity;
      r.generators = cfg.memory_generators;
    }
    lay.regions.push_back(r);
  }

  double widest = 1.0;
  for (std::size_t i = 0; i < lay.regions.size(); ++i)
    widest = std::max(widest, lay.region_area_mb(i));
  lay.cell_side_mb = static_cast<int>(std::ceil(std::sqrt(widest)));
  return lay;
}

int RegionLayout::region_at(int row, int col) const {
  if (row < 0 || col < 0 || row >= grid_rows || col >= grid_cols) return -1;
  int idx = row * grid_cols + col;
  return idx < static_cast<int>(regions.size()) ? idx : -1;
}

double RegionLayout::region_area_mb(std::size_t i) const {
  const Region& r = regions.at(i);
  double factory = AncillaFactory::make(config.factory).area_mb;
  return r.capacity * tech.slot_area_mb + r.generators * factory +
         r.t_factories * factory * tech.t_factory_area_mult +
         tech.router.base_area_mb;
}

double RegionLayout::channel_area_mb() const {
  /* full street grid: horizontal + vertical strips minus intersections */
  double s = cell_side_mb, w = tech.channel_width_mb;
  double width = grid_cols * s + (grid_cols - 1) * w;
  double height = grid_rows * s + (grid_rows - 1) * w;
  return (grid_rows - 1) * w * width + (grid_cols - 1) * w * height -
         (grid_rows - 1) * (grid_cols - 1) * w * w;
}

double RegionLayout::total_area_mb() const {
  double sum = channel_area_mb();
  for (std::size_t i = 0; i < regions.size(); ++i) sum += region_area_mb(i);
  return sum;
}

int RegionLayout::route_straights(std::size_t a, std::size_t b) const {
  const Region& ra = regions.at(a);
  const Region& rb = regions.at(b);
  int cells = std::abs(ra.row - rb.row) + std::abs(ra.col - rb.col);
  return cells *
         (cell_side_mb + static_cast<int>(tech.channel_width_mb));
}

int RegionLayout::route_turns(std::size_t a, std::size_t b) const {
  const Region& ra = regions.at(a);
  const Region& rb = regions.at(b);
  return ra.row != rb.row && ra.col != rb.col ? 1 : 0;
}

int RegionLayout::intra_region_straights() const {
  return (cell_side_mb + 1) / 2;
}

std::vector<std::size_t> RegionLayout::t_site_regions() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < regions.size(); ++i)
    if (regions[i].t_site) out.push_back(i);
  return out;
}

std::size_t RegionLayout::total_capacity() const {
  std::size_t cap = 0;
  for (const Region& r : regions) cap += static_cast<std::size_t>(r.capacity);
  return cap;
}

DatapathConfig fit_datapath(DatapathKind kind, std::size_t qubits,
                            const TechModel& tech) {
  int d = 1;
  for (;;) {
    DatapathConfig cfg = DatapathConfig::preset(kind, d);
    const RegionLayout lay = instantiate(cfg, tech);
    if (lay.total_capacity() >= qubits + 1) return cfg;
    d = std::max(d + 1, d * 2);
  }
}

}  // namespace qcad
