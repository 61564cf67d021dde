#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "json.hpp"
#include "qcad/pipeline.hpp"
#include "qcad/randgen.hpp"

using namespace qcad;

namespace {

Circuit small_circuit() {
  RandSpec spec;
  spec.gates = 60;
  spec.qubits = 6;
  spec.seed = 4;
  return decompose_toffoli(gen_random(spec));
}

}  // namespace

TEST_CASE("fnv1a reference values") {
  CHECK(fnv1a("") == 0xcbf29ce484222325ull);
  CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cull);
  CHECK(fnv1a("ab") != fnv1a("ba"));
}

TEST_CASE("manifest json is canonical and stable") {
  RunManifest man;
  man.command = "map";
  man.trials = 4000;
  man.seed = 42;
  std::string j = man.to_json();
  CHECK(j.rfind("{\"command\":", 0) == 0); /* keys sorted, command first */
  CHECK(j.find("timestamp") == std::string::npos);
  CHECK(man.hash() == fnv1a(j));
  CHECK(man.hash() == RunManifest{man}.hash());

  nlohmann::json parsed = nlohmann::json::parse(j);
  CHECK(parsed["version"] == "0.1.0");
  CHECK(parsed["trials"] == 4000);
  CHECK(parsed["seed"] == 42);

  RunManifest other = man;
  other.seed = 43;
  CHECK(other.hash() != man.hash());
}

TEST_CASE("evaluate_config is deterministic") {
  Circuit c = small_circuit();
  TechModel tech = TechModel::defaults(1);
  DatapathConfig cfg = fit_datapath(DatapathKind::Qalypso, 6, tech);
  EvalResult a = evaluate_config(c, cfg, tech, 3000, 11);
  EvalResult b = evaluate_config(c, cfg, tech, 3000, 11);
  CHECK(a.schedule.makespan_us == b.schedule.makespan_us);
  CHECK(a.mc.successes == b.mc.successes);
  CHECK(a.metrics.area_mb == b.metrics.area_mb);
  CHECK(a.metrics.adcr_mm2_us == b.metrics.adcr_mm2_us);
}

TEST_CASE("evaluate_config measures the provisioned machine") {
  Circuit c = small_circuit();
  TechModel tech = TechModel::defaults(1);
  DatapathConfig cfg = fit_datapath(DatapathKind::Qalypso, 6, tech);
  EvalResult r = evaluate_config(c, cfg, tech, 2000, 3);
  CHECK(r.metrics.latency_us ==
        doctest::Approx(r.schedule.makespan_us).epsilon(1e-12));
  CHECK(r.metrics.area_mb >= r.layout.total_area_mb() - 1e-9);
  CHECK(r.metrics.breakdown.total() ==
        doctest::Approx(r.metrics.area_mb).epsilon(1e-9));
  CHECK(r.network.aggressiveness == 1.0);
}

TEST_CASE("single-point search returns that point") {
  Circuit c = small_circuit();
  TechModel tech = TechModel::defaults(1);
  DatapathConfig tmpl = DatapathConfig::preset(DatapathKind::Qalypso, 1);
  SweepSpec sweep;
  sweep.data_regions = {1};
  SearchResult r = adcr_search(c, tmpl, sweep, tech, 2000, 9);
  CHECK(r.points.size() == 1);
  CHECK(r.best_index == 0);
  CHECK(r.points[0].mapped);
  CHECK(r.points[0].metrics.adcr_mm2_us ==
        doctest::Approx(r.best.metrics.adcr_mm2_us));
}

TEST_CASE("search keeps the lowest adcr over the table") {
  Circuit c = small_circuit();
  TechModel tech = TechModel::defaults(1);
  DatapathConfig tmpl = DatapathConfig::preset(DatapathKind::Qalypso, 1);
  SweepSpec sweep;
  sweep.data_regions = {1, 2, 4};
  sweep.aggressiveness = {0.5, 1.0};
  SearchResult r = adcr_search(c, tmpl, sweep, tech, 2000, 9);
  CHECK(r.points.size() == 6);
  double best = std::numeric_limits<double>::infinity();
  std::size_t best_at = 0;
  for (std::size_t i = 0; i < r.points.size(); ++i) {
    if (!r.points[i].mapped) continue;
    if (r.points[i].metrics.adcr_mm2_us < best) {
      best = r.points[i].metrics.adcr_mm2_us;
      best_at = i;
    }
  }
  CHECK(r.best_index == best_at);
  CHECK(r.best.metrics.adcr_mm2_us == doctest::Approx(best));
}

TEST_CASE("failed points stay in the table with their reason") {
  Circuit c = small_circuit(); /* six qubits */
  TechModel tech = TechModel::defaults(1);
  DatapathConfig tmpl = DatapathConfig::preset(DatapathKind::Qla, 1, 0);
  SweepSpec sweep;
  sweep.data_regions = {1, 8}; /* D=1 holds 2 < 7 slots, D=8 holds 16 */
  SearchResult r = adcr_search(c, tmpl, sweep, tech, 1000, 2);
  REQUIRE(r.points.size() == 2);
  CHECK_FALSE(r.points[0].mapped);
  CHECK_FALSE(r.points[0].error.empty());
  CHECK(r.points[1].mapped);
  CHECK(r.best_index == 1);

  std::string csv = sweep_csv(r);
  CHECK(csv.rfind("config,aggressiveness,mapped,area_mb,latency_us,"
                  "p_success,adcr,teleports,stall_us,error",
                  0) == 0);
  std::size_t lines = std::count(csv.begin(), csv.end(), '\n');
  CHECK(lines == 3);
  CHECK(csv.find(",0,") != std::string::npos); /* unmapped row */
}

TEST_CASE("search with no mappable point throws") {
  Circuit c = small_circuit();
  TechModel tech = TechModel::defaults(1);
  DatapathConfig tmpl = DatapathConfig::preset(DatapathKind::Qla, 1, 0);
  SweepSpec sweep;
  sweep.data_regions = {1, 2}; /* at most 4 slots, need 7 */
  CHECK_THROWS_AS(adcr_search(c, tmpl, sweep, tech, 1000, 2), MapError);
}

TEST_CASE("aggressiveness below one can only shrink provisioned capacity") {
  RandSpec spec;
  spec.gates = 200;
  spec.qubits = 16;
  spec.rent = 0.9;
  spec.seed = 12;
  Circuit c = decompose_toffoli(gen_random(spec));
  TechModel tech = TechModel::defaults(1);
  DatapathConfig cfg = fit_datapath(DatapathKind::Qla, 16, tech);
  EvalResult full = evaluate_config(c, cfg, tech, 500, 6, 1.0);
  EvalResult lean = evaluate_config(c, cfg, tech, 500, 6, 0.5);
  double full_cap = 0.0, lean_cap = 0.0;
  for (int v : full.network.provisioned) full_cap += v;
  for (int v : lean.network.provisioned) lean_cap += v;
  CHECK(lean_cap <= full_cap);
  CHECK(lean.metrics.breakdown.network <= full.metrics.breakdown.network);
  /* saturated hops pay latency, so the lean machine is never faster */
  CHECK(lean.schedule.makespan_us >= full.schedule.makespan_us - 1e-9);
}
