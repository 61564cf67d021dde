#include "qcad/tech.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

namespace qcad {

ErrorSet ErrorSet::set1() { return ErrorSet{}; }

ErrorSet ErrorSet::set2() {
  ErrorSet es;
  es.one_qubit.p_fail = 1e-4;
  es.two_qubit.p_fail = 1e-4;
  es.measure.p_fail = 1e-4;
  es.prep.p_fail = 1e-4;
  es.move_straight.p_fail = 1e-6;
  es.move_turn.p_fail = 1e-6;
  es.idle_rate_per_us = 1e-8;
  return es;
}

ErrorSet ErrorSet::by_index(int index) {
  if (index == 1) return set1();
  if (index == 2) return set2();
  throw std::invalid_argument("error set index must be 1 or 2");
}

PhysOpCounts& PhysOpCounts::operator+=(const PhysOpCounts& o) {
  one_qubit += o.one_qubit;
  two_qubit += o.two_qubit;
  prep += o.prep;
  measure += o.measure;
  return *this;
}

PhysOpCounts PhysOpCounts::scaled(std::int64_t k) const {
  return PhysOpCounts{one_qubit * k, two_qubit * k, prep * k, measure * k};
}

GateCostTable GateCostTable::steane_defaults() {
  GateCostTable t;
  auto& k = t.per_kind;
  k[static_cast<int>(GateKind::X)] = {7, 0, 0, 0};
  k[static_cast<int>(GateKind::Z)] = {7, 0, 0, 0};
  k[static_cast<int>(GateKind::H)] = {7, 0, 0, 0};
  k[static_cast<int>(GateKind::S)] = {7, 0, 0, 0};
  /* T consumes a prepared T block: transversal interaction plus readback. */
  k[static_cast<int>(GateKind::T)] = {7, 7, 0, 7};
  k[static_cast<int>(GateKind::Cnot)] = {0, 7, 0, 0};
  k[static_cast<int>(GateKind::PrepZ)] = {0, 0, 7, 0};
  k[static_cast<int>(GateKind::Measure)] = {0, 0, 0, 7};
  /* Two syndrome extractions against encoded |0> blocks. */
  k[static_cast<int>(GateKind::Correct)] = {0, 14, 0, 14};
  /* Toffoli is costed through its 15-gate decomposition. */
  PhysOpCounts toffoli;
  toffoli += k[static_cast<int>(GateKind::Cnot)].scaled(6);
  toffoli += k[static_cast<int>(GateKind::T)].scaled(7);
  toffoli += k[static_cast<int>(GateKind::H)].scaled(2);
  k[static_cast<int>(GateKind::Toffoli)] = toffoli;
  return t;
}

PhysOpCounts GateCostTable::cost(GateKind k) const {
  return per_kind[static_cast<int>(k)];
}

std::int64_t GateCostTable::correction_total_ops() const {
  return cost(GateKind::Correct).total() + correction_factory_ops;
}

double GateCostTable::logical_duration_us(GateKind k,
                                          const ErrorSet& es) const {
  switch (k) {
    case GateKind::X:
    case GateKind::Z:
    case GateKind::H:
    case GateKind::S:
      return es.one_qubit.latency_us;
    case GateKind::Cnot:
      return es.two_qubit.latency_us;
    case GateKind::T:
      return es.two_qubit.latency_us + es.measure.latency_us +
             es.one_qubit.latency_us;
    case GateKind::PrepZ:
      return es.prep.latency_us;
    case GateKind::Measure:
      return es.measure.latency_us;
    case GateKind::Correct:
      /* two rounds of transversal interaction plus readout */
      return 2.0 * (es.two_qubit.latency_us + es.measure.latency_us);
    case GateKind::Toffoli: {
      /* serial depth of the decomposition on the target line */
      return 2.0 * es.one_qubit.latency_us + 6.0 * es.two_qubit.latency_us +
             7.0 * es.one_qubit.latency_us;
    }
  }
  return es.one_qubit.latency_us;
}

double GateCostTable::teleport_duration_us(const ErrorSet& es) const {
  return es.two_qubit.latency_us + es.measure.latency_us +
         es.one_qubit.latency_us;
}

double GateCostTable::average_gate_bundle_us(const ErrorSet& es) const {
  return 0.5 * (es.one_qubit.latency_us + es.two_qubit.latency_us);
}

double physical_cost_total(const Circuit& flat, const GateCostTable& t) {
  std::int64_t total = 0;
  for (const auto& g : flat.gates) {
    total += t.cost(g.kind).total();
    if (g.kind == GateKind::Correct) total += t.correction_factory_ops;
  }
  return static_cast<double>(total);
}

AncillaFactory AncillaFactory::make(FactoryKind kind) {
  AncillaFactory f;
  f.kind = kind;
  switch (kind) {
    case FactoryKind::QlaBasic:
      f.area_mb = 49.0;
      f.latency_us = 60.0;
      f.throughput_blocks_per_us = 1.0 / 60.0;
      f.infidelity_factor = 10.0;
      f.pipelined = false;
      break;
    case FactoryKind::LqlaOptimized:
      f.area_mb = 49.0;
      f.latency_us = 45.0;
      f.throughput_blocks_per_us = 1.0 / 45.0;
      f.infidelity_factor = 5.0;
      f.pipelined = false;
      break;
    case FactoryKind::QalypsoPipelined:
      f.area_mb = 147.0;
      f.latency_us = 60.0;
      f.throughput_blocks_per_us = 0.1;  /* one block per gate time */
      f.infidelity_factor = 3.0;
      f.pipelined = true;
      break;
  }
  return f;
}

double purify(double fidelity, int rounds) {
  if (rounds < 0) throw std::invalid_argument("purify: negative round count");
  if (fidelity <= 0.5 || fidelity > 1.0)
    throw std::invalid_argument("purify: fidelity must be in (0.5, 1]");
  double f = fidelity;
  for (int i = 0; i < rounds; ++i) {
    const double good = f * f;
    const double bad = (1.0 - f) * (1.0 - f);
    f = good / (good + bad);
  }
  return f;
}

ChannelResult channel_errors(int straights, int turns, double idle_us,
                             const ErrorSet& es) {
  if (straights < 0 || turns < 0 || idle_us < 0.0)
    throw std::invalid_argument("channel_errors: negative segment count");
  const double keep =
      std::pow(1.0 - es.move_straight.p_fail, straights) *
      std::pow(1.0 - es.move_turn.p_fail, turns) *
      std::pow(1.0 - es.idle_rate_per_us, std::ceil(idle_us));
  ChannelResult r;
  r.probability = 1.0 - keep;
  r.latency_us = straights * es.move_straight.latency_us +
                 turns * es.move_turn.latency_us;
  return r;
}

TechModel TechModel::defaults(int error_set_index) {
  TechModel t;
  t.errors = ErrorSet::by_index(error_set_index);
  t.error_set_index = error_set_index;
  t.costs = GateCostTable::steane_defaults();
  return t;
}

namespace {

void register_keys(TechModel& t, std::map<std::string, double*>& keys) {
  auto physics = [&keys](const std::string& prefix, OpPhysics& op) {
    keys[prefix + ".p"] = &op.p_fail;
    keys[prefix + ".latency_us"] = &op.latency_us;
  };
  physics("error.one_qubit", t.errors.one_qubit);
  physics("error.two_qubit", t.errors.two_qubit);
  physics("error.measure", t.errors.measure);
  physics("error.prep", t.errors.prep);
  physics("error.move_straight", t.errors.move_straight);
  physics("error.move_turn", t.errors.move_turn);
  keys["error.idle_rate_per_us"] = &t.errors.idle_rate_per_us;
  keys["router.base_area_mb"] = &t.router.base_area_mb;
  keys["router.area_per_load_mb"] = &t.router.area_per_load_mb;
  keys["router.epr_base_fidelity"] = &t.router.epr_base_fidelity;
  keys["router.epr_gen_latency_us"] = &t.router.epr_gen_latency_us;
  keys["layout.macroblock_pitch_um"] = &t.macroblock_pitch_um;
  keys["layout.slot_area_mb"] = &t.slot_area_mb;
  keys["layout.channel_width_mb"] = &t.channel_width_mb;
  keys["layout.qla_element_area_mb"] = &t.qla_element_area_mb;
  keys["factory.t_area_mult"] = &t.t_factory_area_mult;
  keys["factory.t_latency_mult"] = &t.t_factory_latency_mult;
  keys["factory.t_infidelity_mult"] = &t.t_factory_infidelity_mult;
  keys["mapper.idle_relocate_multiple"] = &t.idle_relocate_multiple;
  keys["mapper.factory_buffer_depth"] = &t.factory_buffer_depth;
}

}  // namespace

void TechModel::apply_overrides(std::string_view text) {
  std::map<std::string, double*> keys;
  register_keys(*this, keys);
  std::map<std::string, std::int64_t*> int_keys;
  int_keys["cost.correction_factory_ops"] = &costs.correction_factory_ops;
  std::map<std::string, int*> small_keys;
  small_keys["router.purify_rounds"] = &router.purify_rounds;

  std::istringstream is{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string key, eq;
    double value;
    if (!(ls >> key)) continue;
    if (!(ls >> eq) || eq != "=" || !(ls >> value))
      throw std::invalid_argument("tech file line " + std::to_string(lineno) +
                                  ": expected 'key = value'");
    if (auto it = keys.find(key); it != keys.end()) {
      *it->second = value;
    } else if (auto ii = int_keys.find(key); ii != int_keys.end()) {
      *ii->second = static_cast<std::int64_t>(value);
    } else if (auto is2 = small_keys.find(key); is2 != small_keys.end()) {
      *is2->second = static_cast<int>(value);
    } else {
      throw std::invalid_argument("tech file line " + std::to_string(lineno) +
                                  ": unknown key '" + key + "'");
    }
  }
}

TechModel TechModel::from_file(const std::string& path, int error_set_index) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open tech file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  TechModel t = defaults(error_set_index);
  t.apply_overrides(buf.str());
  return t;
}

}  // namespace qcad
