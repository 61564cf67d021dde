#include "qcad/metrics.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "json.hpp"

namespace qcad {

double adcr(double area, double latency_single, double p_success) {
  if (std::isnan(p_success) || p_success < 0.0 || p_success > 1.0)
    throw std::invalid_argument("p_success must be in [0, 1]");
  if (p_success == 0.0) return std::numeric_limits<double>::infinity();
  return area * latency_single / p_success;
}

Metrics measure(const MappedSchedule& s, const RegionLayout& layout,
                const McResult& sim, const NetworkSizing* net,
                std::string_view config) {
  const TechModel& tech = layout.tech;
  const AncillaFactory fac = AncillaFactory::make(layout.config.factory);
  Metrics m;
  m.config = std::string(config);
  AreaBreakdown& b = m.breakdown;
  for (const Region& r : layout.regions) {
    const double core =
        r.capacity * tech.slot_area_mb + tech.router.base_area_mb;
    (r.type == RegionType::Data ? b.data : b.memory) += core;
    b.qec += r.generators * fac.area_mb;
    b.t += r.t_factories * fac.area_mb * tech.t_factory_area_mult;
  }
  b.network = layout.channel_area_mb();
  if (net) b.network += net->extra_router_area_mb(layout);
  m.area_mb = b.total();
  m.area_mm2 = tech.area_mm2(m.area_mb);
  m.latency_us = s.makespan_us;
  m.p_success = sim.p_success;
  m.ci_low = sim.ci_low;
  m.ci_high = sim.ci_high;
  m.adcr_mm2_us = adcr(m.area_mm2, m.latency_us, m.p_success);
  return m;
}

namespace {

using json = nlohmann::json;

json to_json(const Metrics& m) {
  json j;
  j["config"] = m.config;
  j["area_mb"] = m.area_mb;
  j["area_mm2"] = m.area_mm2;
  j["latency_us"] = m.latency_us;
  j["p_success"] = m.p_success;
  j["ci_low"] = m.ci_low;
  j["ci_high"] = m.ci_high;
  j["adcr"] = m.adcr_mm2_us; /* serialized as null when infinite */
  const AreaBreakdown& b = m.breakdown;
  j["breakdown_mb"] = {{"data", b.data},
                       {"memory", b.memory},
                       {"qec", b.qec},
                       {"t", b.t},
                       {"network", b.network}};
  j["shares"] = {{"data", m.share(b.data)},
                 {"memory", m.share(b.memory)},
                 {"qec", m.share(b.qec)},
                 {"t", m.share(b.t)},
                 {"network", m.share(b.network)}};
  return j;
}

std::string num(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return json(x).dump(); /* shortest round-trip representation */
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  out += '"';
  return out;
}

void csv_row(std::string& out, const Metrics& m) {
  const AreaBreakdown& b = m.breakdown;
  out += csv_field(m.config);
  for (double v : {m.area_mb, m.area_mm2, m.latency_us, m.p_success,
                   m.adcr_mm2_us, m.share(b.data), m.share(b.memory),
                   m.share(b.qec), m.share(b.t), m.share(b.network)}) {
    out += ',';
    out += num(v);
  }
  out += '\n';
}

constexpr std::string_view kCsvHeader =
    "config,area_mb,area_mm2,latency_us,p_success,adcr,share_data,"
    "share_memory,share_qec,share_t,share_network\n";

}  // namespace

std::string emit_report(const Metrics& m, std::string_view format) {
  if (format == "json") return to_json(m).dump(2) + "\n";
  if (format == "csv") {
    std::string out{kCsvHeader};
    csv_row(out, m);
    return out;
  }
  throw std::invalid_argument("unknown report format: " + std::string(format));
}

std::string emit_report(std::span<const Metrics> rows,
                        std::string_view format) {
  if (format == "json") {
    json arr = json::array();
    for (const Metrics& m : rows) arr.push_back(to_json(m));
    return arr.dump(2) + "\n";
  }
  if (format == "csv") {
    std::string out{kCsvHeader};
    for (const Metrics& m : rows) csv_row(out, m);
    return out;
  }
  throw std::invalid_argument("unknown report format: " + std::string(format));
}

}  // namespace qcad
