#include "qcad/pipeline.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace qcad {

namespace {

std::string point_name(const DatapathConfig& cfg, double aggressiveness) {
  std::ostringstream os;
  os << datapath_name(cfg.kind) << "-D" << cfg.data_regions << "-M"
     << cfg.memory_regions;
  if (aggressiveness != 1.0) os << "-a" << aggressiveness;
  return os.str();
}

}  // namespace

EvalResult evaluate_config(const Circuit& c, const DatapathConfig& cfg,
                           const TechModel& tech, std::size_t trials,
                           std::uint64_t seed, double aggressiveness) {
  EvalResult ev;
  ev.config = cfg;
  ev.layout = instantiate(cfg, tech);
  ev.assignment = partition(c, ev.layout);

  MappedSchedule first = schedule(c, ev.layout, ev.assignment);
  if (cfg.kind == DatapathKind::Qalypso) {
    ev.layout = size_ancilla(first, ev.layout);
    first = schedule(c, ev.layout, ev.assignment);
  }
  ev.network = size_network(first, ev.layout, aggressiveness);
  ev.schedule = schedule(c, ev.layout, ev.assignment, &ev.network);

  ErrorTrace trace = build_error_trace(c, ev.schedule, ev.layout);
  ev.mc = mc_run(trace, trials, seed);
  ev.metrics = measure(ev.schedule, ev.layout, ev.mc, &ev.network,
                       point_name(cfg, aggressiveness));
  return ev;
}

SearchResult adcr_search(const Circuit& c, const DatapathConfig& tmpl,
                         const SweepSpec& sweep, const TechModel& tech,
                         std::size_t trials, std::uint64_t seed) {
  std::vector<int> ds = sweep.data_regions;
  if (ds.empty()) ds.push_back(tmpl.data_regions);
  std::vector<int> ms = sweep.memory_regions;
  if (ms.empty()) ms.push_back(-1); /* preset default */
  std::vector<double> as = sweep.aggressiveness;
  if (as.empty()) as.push_back(1.0);

  SearchResult res;
  bool have_best = false;
  for (int d : ds) {
    for (int m : ms) {
      for (double a : as) {
        SweepPoint pt;
        pt.aggressiveness = a;
        try {
          DatapathConfig cfg = DatapathConfig::preset(tmpl.kind, d, m);
          cfg.policy = tmpl.policy;
          cfg.factory = tmpl.factory;
          pt.config = cfg;
          pt.metrics.config = point_name(cfg, a);
          EvalResult ev = evaluate_config(c, cfg, tech, trials, seed, a);
          pt.mapped = true;
          pt.metrics = ev.metrics;
          pt.makespan_us = ev.schedule.makespan_us;
          pt.teleports = ev.schedule.teleport_count;
          pt.stall_us = ev.schedule.ancilla_stall_us;
          if (!have_best ||
              ev.metrics.adcr_mm2_us < res.best.metrics.adcr_mm2_us) {
            have_best = true;
            res.best = std::move(ev);
            res.best_index = res.points.size();
          }
        } catch (const std::exception& e) {
          pt.mapped = false;
          pt.error = e.what();
          if (pt.metrics.config.empty()) {
            std::ostringstream nm;
            nm << datapath_name(tmpl.kind) << "-D" << d << "-M" << m;
            pt.metrics.config = nm.str();
          }
        }
        res.points.push_back(std::move(pt));
      }
    }
  }
  if (!have_best) throw MapError("all points failed to map", 0.0);
  return res;
}

std::string sweep_csv(const SearchResult& r) {
  std::ostringstream os;
  os << "config,aggressiveness,mapped,area_mb,latency_us,p_success,adcr,"
        "teleports,stall_us,error\n";
  for (const SweepPoint& p : r.points) {
    os << p.metrics.config << ',' << p.aggressiveness << ','
       << (p.mapped ? 1 : 0) << ',';
    if (p.mapped) {
      os << p.metrics.area_mb << ',' << p.makespan_us << ','
         << p.metrics.p_success << ',';
      if (std::isfinite(p.metrics.adcr_mm2_us))
        os << p.metrics.adcr_mm2_us;
      else
        os << "inf";
      os << ',' << p.teleports << ',' << p.stall_us << ',';
    } else {
      os << ",,,,,,";
    }
    /* commas inside error messages would break the row */
    std::string err = p.error;
    for (char& ch : err)
      if (ch == ',' || ch == '\n') ch = ';';
    os << err << '\n';
  }
  return os.str();
}

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char b : bytes) {
    h ^= b;
    h *= 1099511628211ull;
  }
  return h;
}

std::string RunManifest::to_json() const {
  nlohmann::json j;
  j["version"] = version;
  j["command"] = command;
  j["input"] = input;
  j["tech_file"] = tech_file;
  j["error_set"] = error_set;
  j["datapath"] = datapath;
  j["qec_mode"] = qec_mode;
  j["sweep"] = sweep;
  j["trials"] = trials;
  j["seed"] = seed;
  j["out_dir"] = out_dir;
  return j.dump(); /* nlohmann objects serialize with sorted keys */
}

std::uint64_t RunManifest::hash() const { return fnv1a(to_json()); }

}  // namespace qcad
