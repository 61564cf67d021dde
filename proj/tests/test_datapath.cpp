#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
#include "qcad/datapath.hpp"

using namespace qcad;

TEST_CASE("datapath names round-trip") {
  for (DatapathKind k : {DatapathKind::Qla, DatapathKind::Lqla,
                         DatapathKind::Cqla, DatapathKind::CqlaPlus,
                         DatapathKind::Qalypso}) {
    auto back = datapath_from_name(datapath_name(k));
    REQUIRE(back.has_value());
    CHECK(*back == k);
  }
  CHECK_FALSE(datapath_from_name("nonesuch").has_value());
}

TEST_CASE("qla with four data regions tiles a 2x2 grid of routers") {
  TechModel tech = TechModel::defaults(1);
  DatapathConfig cfg = DatapathConfig::preset(DatapathKind::Qla, 4);
  RegionLayout lay = instantiate(cfg, tech);
  CHECK(lay.size() == 4);
  CHECK(lay.grid_rows == 2);
  CHECK(lay.grid_cols == 2);
  for (const Region& r : lay.regions) {
    CHECK(r.type == RegionType::Data);
    CHECK(r.capacity == 2);
    CHECK(r.generators == 2);
  }
}

TEST_CASE("cqla memory regions hold 64 logical qubits") {
  DatapathConfig cfg = DatapathConfig::preset(DatapathKind::Cqla, 2, 2);
  RegionLayout lay = instantiate(cfg, TechModel::defaults(1));
  CHECK(lay.size() == 4);
  int memories = 0;
  for (const Region& r : lay.regions)
    if (r.type == RegionType::Memory) {
      ++memories;
      CHECK(r.capacity == 64);
    }
  CHECK(memories == 2);
}

TEST_CASE("qalypso single region carries the pipelined factory pair") {
  DatapathConfig cfg = DatapathConfig::preset(DatapathKind::Qalypso, 1, 0);
  cfg.data_capacity = 8;
  cfg.data_generators = 2;
  RegionLayout lay = instantiate(cfg, TechModel::defaults(1));
  CHECK(lay.size() == 1);
  CHECK(lay.regions[0].capacity == 8);
  CHECK(lay.regions[0].generators == 2);
  CHECK(lay.config.factory == FactoryKind::QalypsoPipelined);
}

TEST_CASE("region area is slots plus factories plus router share") {
  TechModel tech = TechModel::defaults(1);
  DatapathConfig cfg = DatapathConfig::preset(DatapathKind::Qalypso, 1, 0);
  cfg.data_generators = 0;
  RegionLayout bare = instantiate(cfg, tech);
  cfg.data_generators = 2;
  RegionLayout two = instantiate(cfg, tech);
  cfg.data_generators = 4;
  RegionLayout four = instantiate(cfg, tech);
  double f2 = two.region_area_mb(0) - bare.region_area_mb(0);
  double f4 = four.region_area_mb(0) - bare.region_area_mb(0);
  CHECK(f4 == doctest::Approx(2.0 * f2)); /* factory area is linear */
  /* zero generators leaves slots + the region's t factory + router */
  AncillaFactory fac = AncillaFactory::make(cfg.factory);
  CHECK(bare.region_area_mb(0) ==
        doctest::Approx(cfg.data_capacity * tech.slot_area_mb +
                        fac.area_mb * tech.t_factory_area_mult +
                        tech.router.base_area_mb));
}

TEST_CASE("qla element area recomputes from the published constant") {
  TechModel tech = TechModel::defaults(1);
  DatapathConfig cfg = DatapathConfig::preset(DatapathKind::Qla, 1);
  RegionLayout lay = instantiate(cfg, tech);
  /* 2 slots + 2 basic generators + router */
  AncillaFactory fac = AncillaFactory::make(FactoryKind::QlaBasic);
  double expect = 2 * tech.slot_area_mb + 2 * fac.area_mb +
                  tech.router.base_area_mb;
  CHECK(expect == doctest::Approx(tech.qla_element_area_mb));
  CHECK(lay.region_area_mb(0) == doctest::Approx(tech.qla_element_area_mb));
}

TEST_CASE("total area sums regions plus channels with no overlap") {
  DatapathConfig cfg = DatapathConfig::preset(DatapathKind::CqlaPlus, 4, 2);
  RegionLayout lay = instantiate(cfg, TechModel::defaults(1));
  double sum = 0.0;
  for (std::size_t i = 0; i < lay.size(); ++i) sum += lay.region_area_mb(i);
  CHECK(lay.total_area_mb() ==
        doctest::Approx(sum + lay.channel_area_mb()).epsilon(1e-12));
  CHECK(lay.channel_area_mb() > 0.0);
}

TEST_CASE("instantiate is deterministic") {
  DatapathConfig cfg = DatapathConfig::preset(DatapathKind::Qalypso, 6, 2);
  TechModel tech = TechModel::defaults(2);
  RegionLayout a = instantiate(cfg, tech);
  RegionLayout b = instantiate(cfg, tech);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a.regions[i].row == b.regions[i].row);
    CHECK(a.regions[i].col == b.regions[i].col);
    CHECK(a.regions[i].capacity == b.regions[i].capacity);
  }
  CHECK(a.total_area_mb() == b.total_area_mb());
}

TEST_CASE("invalid configs are rejected") {
  DatapathConfig cfg = DatapathConfig::preset(DatapathKind::Qla, 0);
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  DatapathConfig neg = DatapathConfig::preset(DatapathKind::Cqla, 2);
  neg.data_capacity = -1;
  CHECK_THROWS_AS(instantiate(neg, TechModel::defaults(1)),
                  std::invalid_argument);
}

TEST_CASE("route geometry is symmetric and zero on the diagonal") {
  DatapathConfig cfg = DatapathConfig::preset(DatapathKind::Qla, 6);
  RegionLayout lay = instantiate(cfg, TechModel::defaults(1));
  for (std::size_t a = 0; a < lay.size(); ++a) {
    CHECK(lay.route_straights(a, a) == 0);
    for (std::size_t b = 0; b < lay.size(); ++b) {
      CHECK(lay.route_straights(a, b) == lay.route_straights(b, a));
      if (a != b) CHECK(lay.route_straights(a, b) > 0);
    }
  }
}

TEST_CASE("designated t sites appear at the configured stride") {
  DatapathConfig cfg = DatapathConfig::preset(DatapathKind::Qalypso, 8, 2);
  REQUIRE(cfg.policy == TGatePolicy::DesignatedSites);
  RegionLayout lay = instantiate(cfg, TechModel::defaults(1));
  std::vector<std::size_t> sites = lay.t_site_regions();
  CHECK(sites.size() == 2); /* stride 4 over 8 data regions */
  for (std::size_t s : sites) {
    CHECK(lay.regions[s].t_site);
    CHECK(lay.regions[s].t_factories > 0);
  }
}

TEST_CASE("fit_datapath grows until qubits plus slack fit") {
  TechModel tech = TechModel::defaults(1);
  DatapathConfig cfg = fit_datapath(DatapathKind::Qla, 21, tech);
  RegionLayout lay = instantiate(cfg, tech);
  CHECK(lay.total_capacity() >= 22);
  /* one preset step smaller no longer fits */
  DatapathConfig smaller = DatapathConfig::preset(DatapathKind::Qla,
                                                  cfg.data_regions - 1);
  CHECK(instantiate(smaller, tech).total_capacity() < 22);

  DatapathConfig q = fit_datapath(DatapathKind::Qalypso, 3, tech);
  CHECK(instantiate(q, tech).total_capacity() >= 4);
}
