/*
 * qcad: command-line front end for the layout flow.
 *
 * Subcommands compose through files (netlist text plus JSON sidecars), so
 * each stage is independently scriptable:
 *
 *   qcad gen-random --qubits 100 --gates 1000 --seed 7 > rand.qn
 *   qcad optimize-qec rand.qn --edist 3 > corrected.qn
 *   qcad map corrected.qn --datapath qalypso --sweep-D 1:8:1 --out results/
 *   qcad simulate corrected.qn --trials 100000 --seed 7
 *
 * Exit codes: 0 ok, 2 parse failure (argv or netlist), 3 QEC stage failure,
 * 4 mapping failure, 5 simulation failure.
 */

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <limits>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "qcad/adders.hpp"
#include "qcad/circuit.hpp"
#include "qcad/datapath.hpp"
#include "qcad/errorsim.hpp"
#include "qcad/mapper.hpp"
#include "qcad/metrics.hpp"
#include "qcad/netlist.hpp"
#include "qcad/pipeline.hpp"
#include "qcad/qec.hpp"
#include "qcad/randgen.hpp"
#include "qcad/shor.hpp"
#include "qcad/tech.hpp"

namespace {

constexpr const char* kVersion = "0.1.0";

constexpr int kExitParse = 2;
constexpr int kExitQec = 3;
constexpr int kExitMap = 4;
constexpr int kExitSim = 5;

using nlohmann::json;

std::string iso_now() {
  std::time_t t = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

std::string hex64(std::uint64_t v) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string read_text(const std::string& path) {
  if (path == "-") {
    std::ostringstream ss;
    ss << std::cin.rdbuf();
    return ss.str();
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw qcad::ParseError(0, 0, "cannot open input: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out << text;
}

qcad::TechModel load_tech(int error_set) {
  if (const char* p = std::getenv("QCAD_TECH_FILE"))
    if (*p) return qcad::TechModel::from_file(p, error_set);
  return qcad::TechModel::defaults(error_set);
}

/* version/hash/seed header every JSON artifact starts from */
json envelope(const qcad::RunManifest& m) {
  json j;
  j["version"] = m.version;
  j["manifest_hash"] = hex64(m.hash());
  j["seed"] = m.seed;
  j["timestamp"] = iso_now();
  return j;
}

/* netlists carry the same provenance as comments */
std::string netlist_header(const qcad::RunManifest& m) {
  std::ostringstream os;
  os << "# qcad " << m.version << " manifest=" << hex64(m.hash())
     << " seed=" << m.seed << "\n";
  return os.str();
}

std::vector<int> parse_range(const std::string& text) {
  /* "a:b:step" inclusive range, or a single value */
  std::vector<int> out;
  int a = 0, b = 0, s = 1;
  char c1 = 0, c2 = 0;
  int n = std::sscanf(text.c_str(), "%d%c%d%c%d", &a, &c1, &b, &c2, &s);
  if (n == 1) {
    out.push_back(a);
  } else if ((n == 3 || n == 5) && c1 == ':' && (n == 3 || c2 == ':')) {
    if (s <= 0) throw CLI::ValidationError("range step must be positive");
    for (int v = a; v <= b; v += s) out.push_back(v);
  } else {
    throw CLI::ValidationError("expected N or a:b:step, got '" + text + "'");
  }
  if (out.empty()) throw CLI::ValidationError("empty range: " + text);
  return out;
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw CLI::ValidationError("bad number in list: '" + item + "'");
    }
  }
  if (out.empty()) throw CLI::ValidationError("empty list: " + text);
  return out;
}

qcad::DatapathKind parse_datapath(const std::string& name) {
  auto k = qcad::datapath_from_name(name);
  if (!k) throw CLI::ValidationError("unknown datapath: " + name);
  return *k;
}

/* parse -> flatten; mapping additionally lowers Toffolis to two-qubit form */
qcad::Circuit load_circuit(const std::string& path) {
  qcad::Circuit c = qcad::parse_netlist(read_text(path));
  if (c.hierarchical()) c = qcad::flatten(c);
  return c;
}

struct QecChoice {
  bool every_gate = false;
  bool auto_5pct = false;
  std::size_t budget = 0;
  bool has_budget = false;
  int edist = 0; /* 0 = unset */

  std::string describe() const {
    if (every_gate) return "every-gate";
    if (auto_5pct) return "auto-5pct";
    if (has_budget) return "budget:" + std::to_string(budget);
    if (edist > 0) return "edist:" + std::to_string(edist);
    return "none";
  }
};

void add_qec_flags(CLI::App* cmd, QecChoice& q) {
  auto* e = cmd->add_option("--edist", q.edist,
                            "fixed accumulation threshold (T)");
  auto* a = cmd->add_flag("--auto-5pct", q.auto_5pct,
                          "largest T within 5% of every-gate success");
  auto* b = cmd->add_option("--budget", q.budget,
                            "best success with at most N corrections");
  auto* g =
      cmd->add_flag("--every-gate", q.every_gate, "correct after every gate");
  e->excludes(a)->excludes(b)->excludes(g);
  a->excludes(b)->excludes(g);
  b->excludes(g);
  cmd->callback([&q, b] { q.has_budget = b->count() > 0; });
}

struct SimOpts {
  int error_set = 1;
  std::string datapath = "qalypso";
  std::size_t trials = 20000;
  std::uint64_t seed = 1;
};

void add_sim_flags(CLI::App* cmd, SimOpts& o) {
  cmd->add_option("--error-set", o.error_set, "technology error set")
      ->check(CLI::IsMember({1, 2}));
  cmd->add_option("--datapath", o.datapath,
                  "qla | lqla | cqla | cqla+ | qalypso");
  cmd->add_option("--trials", o.trials, "Monte Carlo trials");
  cmd->add_option("--seed", o.seed, "master RNG seed");
}

/* applies a QEC choice to a flat logical circuit */
struct QecOutcome {
  qcad::CorrectionPlacement placement;
  int threshold = 0; /* 0 = every-gate */
  double p_success = -1.0;
  double p_every_gate = -1.0;
  bool fell_back = false;
};

QecOutcome run_qec(const qcad::Circuit& c, const QecChoice& q,
                   const SimOpts& sim, const qcad::TechModel& tech) {
  QecOutcome out;
  if (q.every_gate || q.describe() == "none") {
    out.placement = qcad::every_gate_placement(c);
    return out;
  }
  if (q.edist > 0) {
    qcad::EDistConfig cfg;
    cfg.threshold = q.edist;
    out.placement = qcad::insert_corrections(c, cfg);
    out.threshold = q.edist;
    return out;
  }
  /* tuned modes need the mapped-success evaluator */
  qcad::DatapathKind kind = parse_datapath(sim.datapath);
  qcad::Circuit lowered = qcad::decompose_toffoli(c);
  qcad::DatapathConfig cfg =
      qcad::fit_datapath(kind, lowered.qubits.size(), tech);
  qcad::SuccessEval eval = [&](const qcad::Circuit& raw,
                               const qcad::CorrectionPlacement& p) {
    qcad::Circuit corrected =
        qcad::decompose_toffoli(qcad::apply_placement(raw, p));
    qcad::EvalResult ev =
        qcad::evaluate_config(corrected, cfg, tech, sim.trials, sim.seed);
    return ev.mc.p_success;
  };
  qcad::EDistConfig base;
  qcad::TuneMode mode =
      q.auto_5pct ? qcad::TuneMode::MaxTWithin5Pct : qcad::TuneMode::Budget;
  qcad::TuneResult r = qcad::tune_threshold(c, mode, eval, base, q.budget);
  out.placement = r.placement;
  out.threshold = r.threshold;
  out.p_success = r.p_success;
  out.p_every_gate = r.p_every_gate;
  out.fell_back = r.fell_back_to_every_gate;
  return out;
}

void emit_output(const std::string& text, const std::string& out_dir,
                 const std::string& filename, bool also_stdout) {
  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    write_file(std::filesystem::path(out_dir) / filename, text);
  }
  if (also_stdout || out_dir.empty()) std::cout << text;
}

json metrics_json(const qcad::Metrics& m) {
  /* reuse the library's canonical JSON schema */
  return json::parse(qcad::emit_report(m, "json"));
}

int cmd_gen_random(const qcad::RandSpec& spec, const std::string& out_dir) {
  qcad::RunManifest man;
  man.command = "gen-random";
  man.input = "qubits=" + std::to_string(spec.qubits) +
              ",gates=" + std::to_string(spec.gates) +
              ",rent=" + std::to_string(spec.rent);
  man.seed = spec.seed;
  man.out_dir = out_dir;

  qcad::Circuit c = qcad::gen_random(spec);
  std::string text = netlist_header(man) + qcad::emit_netlist(c);
  emit_output(text, out_dir, "random.qn", out_dir.empty());

  if (!out_dir.empty()) {
    json j = envelope(man);
    j["qubits"] = c.qubits.size();
    j["gates"] = c.gates.size();
    j["depth"] = c.depth();
    j["rent_requested"] = spec.rent;
    write_file(std::filesystem::path(out_dir) / "gen.json", j.dump(2) + "\n");
  }
  return 0;
}

int cmd_optimize_qec(const std::string& input, const QecChoice& q,
                     const SimOpts& sim, const std::string& out_dir) {
  qcad::RunManifest man;
  man.command = "optimize-qec";
  man.input = input;
  man.error_set = sim.error_set;
  man.datapath = sim.datapath;
  man.qec_mode = q.describe();
  man.trials = sim.trials;
  man.seed = sim.seed;
  man.out_dir = out_dir;

  qcad::Circuit c;
  qcad::TechModel tech;
  try {
    c = load_circuit(input);
    tech = load_tech(sim.error_set);
  } catch (const std::exception& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitParse;
  }

  try {
    QecOutcome out = run_qec(c, q, sim, tech);
    qcad::Circuit corrected = qcad::apply_placement(c, out.placement);

    std::string text = netlist_header(man) + qcad::emit_netlist(corrected);
    emit_output(text, out_dir, "corrected.qn", out_dir.empty());

    json j = envelope(man);
    j["mode"] = q.describe();
    j["threshold"] = out.threshold;
    j["corrections"] = out.placement.size();
    j["gates_before"] = c.gates.size();
    j["gates_after"] = corrected.gates.size();
    if (out.p_success >= 0) j["p_success"] = out.p_success;
    if (out.p_every_gate >= 0) j["p_every_gate"] = out.p_every_gate;
    j["fell_back_to_every_gate"] = out.fell_back;
    if (!out_dir.empty())
      write_file(std::filesystem::path(out_dir) / "qec.json",
                 j.dump(2) + "\n");
  } catch (const std::exception& e) {
    std::cerr << "qec error: " << e.what() << "\n";
    return kExitQec;
  }
  return 0;
}

int cmd_map(const std::string& input, const SimOpts& sim,
            const std::string& sweep_d, const std::string& sweep_m,
            const std::string& aggr, const std::string& out_dir) {
  qcad::RunManifest man;
  man.command = "map";
  man.input = input;
  man.error_set = sim.error_set;
  man.datapath = sim.datapath;
  man.sweep = "D=" + (sweep_d.empty() ? std::string("auto") : sweep_d) +
              ";M=" + (sweep_m.empty() ? std::string("preset") : sweep_m) +
              ";a=" + (aggr.empty() ? std::string("1") : aggr);
  man.trials = sim.trials;
  man.seed = sim.seed;
  man.out_dir = out_dir;

  qcad::Circuit c;
  qcad::TechModel tech;
  try {
    c = qcad::decompose_toffoli(load_circuit(input));
    tech = load_tech(sim.error_set);
  } catch (const std::exception& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitParse;
  }

  try {
    qcad::DatapathKind kind = parse_datapath(sim.datapath);
    qcad::DatapathConfig tmpl =
        qcad::fit_datapath(kind, c.qubits.size(), tech);

    qcad::SweepSpec sweep;
    if (!sweep_d.empty()) sweep.data_regions = parse_range(sweep_d);
    if (!sweep_m.empty()) sweep.memory_regions = parse_range(sweep_m);
    if (!aggr.empty()) sweep.aggressiveness = parse_list(aggr);

    qcad::SearchResult res =
        qcad::adcr_search(c, tmpl, sweep, tech, sim.trials, sim.seed);

    json j = envelope(man);
    j["best"] = metrics_json(res.best.metrics);
    j["best"]["makespan_us"] = res.best.schedule.makespan_us;
    j["best"]["teleports"] = res.best.schedule.teleport_count;
    j["best"]["ancilla_stall_us"] = res.best.schedule.ancilla_stall_us;
    j["best"]["cut_weight"] = res.best.schedule.cut_weight;
    j["points_total"] = res.points.size();
    std::size_t mapped = 0;
    for (const auto& p : res.points) mapped += p.mapped ? 1 : 0;
    j["points_mapped"] = mapped;

    std::string report = j.dump(2) + "\n";
    emit_output(report, out_dir, "map.json", out_dir.empty());
    if (!out_dir.empty())
      write_file(std::filesystem::path(out_dir) / "sweep.csv",
                 qcad::sweep_csv(res));
  } catch (const std::exception& e) {
    std::cerr << "map error: " << e.what() << "\n";
    return kExitMap;
  }
  return 0;
}

int cmd_simulate(const std::string& input, const SimOpts& sim, int regions,
                 const std::string& out_dir) {
  qcad::RunManifest man;
  man.command = "simulate";
  man.input = input;
  man.error_set = sim.error_set;
  man.datapath = sim.datapath;
  man.trials = sim.trials;
  man.seed = sim.seed;
  man.out_dir = out_dir;

  qcad::Circuit c;
  qcad::TechModel tech;
  try {
    c = qcad::decompose_toffoli(load_circuit(input));
    tech = load_tech(sim.error_set);
  } catch (const std::exception& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitParse;
  }

  qcad::DatapathKind kind = parse_datapath(sim.datapath);
  qcad::DatapathConfig cfg;
  qcad::EvalResult ev;
  try {
    cfg = regions > 0 ? qcad::DatapathConfig::preset(kind, regions)
                      : qcad::fit_datapath(kind, c.qubits.size(), tech);
    ev = qcad::evaluate_config(c, cfg, tech, sim.trials, sim.seed);
  } catch (const std::exception& e) {
    std::cerr << "map error: " << e.what() << "\n";
    return kExitMap;
  }

  json j = envelope(man);
  j["p_success"] = ev.mc.p_success;
  j["ci_low"] = ev.mc.ci_low;
  j["ci_high"] = ev.mc.ci_high;
  j["trials"] = ev.mc.trials;
  j["successes"] = ev.mc.successes;
  j["config"] = ev.metrics.config;
  j["makespan_us"] = ev.schedule.makespan_us;
  emit_output(j.dump(2) + "\n", out_dir, "simulate.json", out_dir.empty());
  return 0;
}

int cmd_adders(const std::string& kind, int n, int m, bool verify,
               std::uint64_t seed, const std::string& out_dir) {
  qcad::RunManifest man;
  man.command = "adders";
  man.input = "kind=" + kind + ",n=" + std::to_string(n) +
              ",m=" + std::to_string(m);
  man.seed = seed;
  man.out_dir = out_dir;

  qcad::AdderSpec spec;
  spec.n = n;
  spec.m = m;
  if (kind == "qrca") {
    spec.kind = qcad::AdderKind::Qrca;
  } else if (kind == "qcla") {
    spec.kind = qcad::AdderKind::Qcla;
  } else {
    std::cerr << "unknown adder kind: " << kind << "\n";
    return kExitParse;
  }

  qcad::AdderCircuit ac = qcad::gen_adder(spec);
  std::string text = netlist_header(man) + qcad::emit_netlist(ac.circuit);
  emit_output(text, out_dir, "adder.qn", out_dir.empty());

  json j = envelope(man);
  j["kind"] = kind;
  j["n"] = n;
  j["m"] = m;
  j["gates"] = ac.circuit.gates.size();
  j["depth"] = ac.circuit.depth();
  j["qubits"] = ac.circuit.qubits.size();
  j["ancilla"] = ac.ancilla.size();
  j["passes"] = ac.passes;
  if (verify) {
    std::uint64_t mask = n >= 64 ? ~0ull : ((1ull << n) - 1);
    std::uint64_t x = seed ? seed : 1;
    auto next = [&x] { /* xorshift64 walk over operand pairs */
      x ^= x << 13;
      x ^= x >> 7;
      x ^= x << 17;
      return x;
    };
    int cases = 200;
    bool ok = true;
    for (int i = 0; i < cases && ok; ++i) {
      std::uint64_t a = next() & mask, b = next() & mask;
      bool anc = false, rest = false;
      std::uint64_t s = qcad::run_adder(ac, a, b, &anc, &rest);
      std::uint64_t want = (n >= 64 ? a + b : (a + b) & ((2ull << n) - 1));
      ok = s == want && anc && rest;
    }
    j["verified"] = ok;
    j["verify_cases"] = cases;
    if (!ok) {
      std::cerr << "adder verification failed\n";
      return kExitQec;
    }
  }
  if (!out_dir.empty())
    write_file(std::filesystem::path(out_dir) / "adder.json",
               j.dump(2) + "\n");
  return 0;
}

int cmd_shor(std::vector<int> ns, const std::string& adder, int m,
             const std::string& qec, const SimOpts& sim, int full_map_limit,
             const std::string& out_dir) {
  qcad::RunManifest man;
  man.command = "shor";
  {
    std::ostringstream os;
    for (std::size_t i = 0; i < ns.size(); ++i)
      os << (i ? "," : "") << ns[i];
    man.input = "n=" + os.str() + ",adder=" + adder;
  }
  man.error_set = sim.error_set;
  man.datapath = sim.datapath;
  man.qec_mode = qec;
  man.trials = sim.trials;
  man.seed = sim.seed;
  man.out_dir = out_dir;

  qcad::ShorSpec base;
  base.adder.m = m;
  if (adder == "qrca") {
    base.adder.kind = qcad::AdderKind::Qrca;
  } else if (adder == "qcla") {
    base.adder.kind = qcad::AdderKind::Qcla;
  } else {
    std::cerr << "unknown adder kind: " << adder << "\n";
    return kExitParse;
  }

  qcad::TechModel tech;
  try {
    tech = load_tech(sim.error_set);
  } catch (const std::exception& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitParse;
  }

  try {
    if (qec == "every-gate") {
      base.qec = qcad::QecMode::EveryGate;
    } else if (qec.rfind("edist:", 0) == 0) {
      base.qec = qcad::QecMode::Optimized;
      base.threshold = std::stoi(qec.substr(6));
    } else if (qec == "auto") {
      /* tune the kernel threshold on the smallest sweep width */
      qcad::ShorSpec probe = base;
      probe.n = *std::min_element(ns.begin(), ns.end());
      probe.qec = qcad::QecMode::Optimized;
      qcad::AdderSpec ks = probe.adder;
      ks.n = probe.n;
      ks.m = std::min(ks.m, ks.n);
      qcad::Circuit kernel = qcad::gen_adder(ks).circuit;
      qcad::DatapathKind kind = parse_datapath(sim.datapath);
      qcad::Circuit low = qcad::decompose_toffoli(kernel);
      qcad::DatapathConfig cfg =
          qcad::fit_datapath(kind, low.qubits.size(), tech);
      qcad::SuccessEval eval = [&](const qcad::Circuit& raw,
                                   const qcad::CorrectionPlacement& p) {
        qcad::Circuit corrected =
            qcad::decompose_toffoli(qcad::apply_placement(raw, p));
        return qcad::evaluate_config(corrected, cfg, tech, sim.trials,
                                     sim.seed)
            .mc.p_success;
      };
      qcad::EDistConfig ecfg;
      qcad::TuneResult r = qcad::tune_threshold(
          kernel, qcad::TuneMode::MaxTWithin5Pct, eval, ecfg);
      base.qec = qcad::QecMode::Optimized;
      base.threshold = r.threshold > 0 ? r.threshold : 3;
    } else {
      std::cerr << "unknown qec mode: " << qec
                << " (want every-gate | edist:N | auto)\n";
      return kExitParse;
    }
  } catch (const std::exception& e) {
    std::cerr << "qec error: " << e.what() << "\n";
    return kExitQec;
  }

  try {
    qcad::DatapathKind kind = parse_datapath(sim.datapath);
    qcad::DatapathConfig dp = qcad::DatapathConfig::preset(kind, 1);
    std::vector<qcad::ShorSweepRow> rows =
        qcad::shor_sweep(ns, base, tech, dp, full_map_limit);

    json j = envelope(man);
    j["qec_mode"] = qec;
    j["threshold"] = base.threshold;
    j["rows"] = json::array();
    for (const auto& r : rows) {
      json row;
      row["n"] = r.est.spec.n;
      row["adder_calls"] = r.est.adder_calls;
      row["logical_total"] = r.est.logical_total;
      row["corrections"] = r.est.corrections;
      row["physical_ops"] = r.est.physical_ops;
      row["qft_share"] = r.est.qft_share;
      row["correction_density"] = r.est.correction_density;
      row["mapped"] = r.mapped;
      row["adder_latency_us"] = r.adder_latency_us;
      row["latency_s"] = r.latency_us * 1e-6;
      row["area_mm2"] = r.area_mm2;
      j["rows"].push_back(row);
    }
    emit_output(j.dump(2) + "\n", out_dir, "shor.json", out_dir.empty());
  } catch (const std::exception& e) {
    std::cerr << "map error: " << e.what() << "\n";
    return kExitMap;
  }
  return 0;
}

int cmd_report(const std::vector<std::string>& inputs,
               const std::string& format, const std::string& out_dir) {
  std::vector<qcad::Metrics> rows;
  try {
    for (const std::string& path : inputs) {
      json j = json::parse(read_text(path));
      /* accept bare metrics objects, arrays, or map.json-style wrappers */
      std::vector<json> objs;
      if (j.is_array()) {
        for (auto& e : j) objs.push_back(e);
      } else if (j.contains("best")) {
        objs.push_back(j["best"]);
      } else {
        objs.push_back(j);
      }
      for (json& o : objs) {
        qcad::Metrics m;
        m.config = o.value("config", std::string());
        m.area_mb = o.value("area_mb", 0.0);
        m.area_mm2 = o.value("area_mm2", 0.0);
        m.latency_us = o.value("latency_us", 0.0);
        m.p_success = o.value("p_success", 1.0);
        m.ci_low = o.value("ci_low", 0.0);
        m.ci_high = o.value("ci_high", 1.0);
        if (o.contains("adcr") && !o["adcr"].is_null())
          m.adcr_mm2_us = o["adcr"].get<double>();
        else
          m.adcr_mm2_us = std::numeric_limits<double>::infinity();
        if (o.contains("breakdown_mb")) {
          json& b = o["breakdown_mb"];
          m.breakdown.data = b.value("data", 0.0);
          m.breakdown.memory = b.value("memory", 0.0);
          m.breakdown.qec = b.value("qec", 0.0);
          m.breakdown.t = b.value("t", 0.0);
          m.breakdown.network = b.value("network", 0.0);
        }
        rows.push_back(std::move(m));
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitParse;
  }
  std::string text = qcad::emit_report(rows, format);
  emit_output(text, out_dir,
              format == "csv" ? "report.csv" : "report.json", true);
  return 0;
}

int cmd_run(const std::string& input, const qcad::RandSpec& gen, bool use_gen,
            const QecChoice& q, const SimOpts& sim, const std::string& sweep_d,
            const std::string& aggr, const std::string& out_dir) {
  qcad::RunManifest man;
  man.command = "run";
  man.input = use_gen ? "gen:qubits=" + std::to_string(gen.qubits) +
                            ",gates=" + std::to_string(gen.gates) +
                            ",rent=" + std::to_string(gen.rent)
                      : input;
  if (const char* p = std::getenv("QCAD_TECH_FILE")) man.tech_file = p;
  man.error_set = sim.error_set;
  man.datapath = sim.datapath;
  man.qec_mode = q.describe();
  man.sweep = "D=" + (sweep_d.empty() ? std::string("auto") : sweep_d) +
              ";a=" + (aggr.empty() ? std::string("1") : aggr);
  man.trials = sim.trials;
  man.seed = sim.seed;
  man.out_dir = out_dir;

  std::filesystem::create_directories(out_dir);
  json mj = envelope(man);
  mj["manifest"] = json::parse(man.to_json());
  write_file(std::filesystem::path(out_dir) / "manifest.json",
             mj.dump(2) + "\n");

  /* stage 1: obtain the logical circuit */
  qcad::Circuit c;
  qcad::TechModel tech;
  try {
    tech = load_tech(sim.error_set);
    if (use_gen) {
      c = qcad::gen_random(gen);
      write_file(std::filesystem::path(out_dir) / "input.qn",
                 netlist_header(man) + qcad::emit_netlist(c));
    } else {
      c = load_circuit(input);
    }
  } catch (const std::exception& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitParse;
  }

  /* stage 2: QEC placement */
  qcad::Circuit corrected;
  try {
    QecOutcome out = run_qec(c, q, sim, tech);
    corrected = qcad::apply_placement(c, out.placement);
    write_file(std::filesystem::path(out_dir) / "corrected.qn",
               netlist_header(man) + qcad::emit_netlist(corrected));
    json j = envelope(man);
    j["mode"] = q.describe();
    j["threshold"] = out.threshold;
    j["corrections"] = out.placement.size();
    write_file(std::filesystem::path(out_dir) / "qec.json", j.dump(2) + "\n");
  } catch (const std::exception& e) {
    std::cerr << "qec error: " << e.what() << "\n";
    return kExitQec;
  }

  /* stage 3: map (sweep) */
  qcad::SearchResult res;
  try {
    qcad::DatapathKind kind = parse_datapath(sim.datapath);
    qcad::Circuit lowered = qcad::decompose_toffoli(corrected);
    qcad::DatapathConfig tmpl =
        qcad::fit_datapath(kind, lowered.qubits.size(), tech);
    qcad::SweepSpec sweep;
    if (!sweep_d.empty()) sweep.data_regions = parse_range(sweep_d);
    if (!aggr.empty()) sweep.aggressiveness = parse_list(aggr);
    res = qcad::adcr_search(lowered, tmpl, sweep, tech, sim.trials, sim.seed);
    write_file(std::filesystem::path(out_dir) / "sweep.csv",
               qcad::sweep_csv(res));
  } catch (const std::exception& e) {
    std::cerr << "map error: " << e.what() << "\n";
    return kExitMap;
  }

  /* stage 4: report (simulation already ran inside the sweep) */
  try {
    json j = envelope(man);
    j["best"] = metrics_json(res.best.metrics);
    j["best"]["makespan_us"] = res.best.schedule.makespan_us;
    j["best"]["teleports"] = res.best.schedule.teleport_count;
    j["p_success"] = res.best.mc.p_success;
    j["ci_low"] = res.best.mc.ci_low;
    j["ci_high"] = res.best.mc.ci_high;
    j["trials"] = res.best.mc.trials;
    std::string report = j.dump(2) + "\n";
    write_file(std::filesystem::path(out_dir) / "report.json", report);
    std::cout << report;
  } catch (const std::exception& e) {
    std::cerr << "sim error: " << e.what() << "\n";
    return kExitSim;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"quantum layout flow: synthesis, QEC tuning, mapping, "
               "simulation, reporting"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  /* ---- gen-random ---- */
  qcad::RandSpec gen_spec;
  gen_spec.qubits = 64;
  gen_spec.gates = 512;
  std::string gen_out;
  auto* gen = app.add_subcommand("gen-random", "seeded random logical circuit");
  gen->add_option("--qubits", gen_spec.qubits, "qubit count");
  gen->add_option("--gates", gen_spec.gates, "gate count");
  gen->add_option("--rent", gen_spec.rent, "communication locality in [0,1]");
  gen->add_option("--seed", gen_spec.seed, "RNG seed");
  gen->add_option("--two-qubit-fraction", gen_spec.two_qubit_fraction,
                  "fraction of CNOT gates");
  gen->add_option("--out", gen_out, "output directory");

  /* ---- optimize-qec ---- */
  std::string qec_input = "-";
  QecChoice qec_choice;
  SimOpts qec_sim;
  std::string qec_out;
  auto* oq = app.add_subcommand("optimize-qec",
                                "insert/tune error-correction points");
  oq->add_option("input", qec_input, "netlist path or - for stdin");
  add_qec_flags(oq, qec_choice);
  add_sim_flags(oq, qec_sim);
  oq->add_option("--out", qec_out, "output directory");

  /* ---- map ---- */
  std::string map_input = "-";
  SimOpts map_sim;
  std::string map_sweep_d, map_sweep_m, map_aggr, map_out;
  auto* mp = app.add_subcommand("map", "layout search over datapath configs");
  mp->add_option("input", map_input, "netlist path or - for stdin");
  add_sim_flags(mp, map_sim);
  mp->add_option("--sweep-D", map_sweep_d, "data regions, N or a:b:step");
  mp->add_option("--sweep-M", map_sweep_m, "memory regions, N or a:b:step");
  mp->add_option("--net-aggressiveness", map_aggr,
                 "router provisioning multipliers, comma list in (0,1]");
  mp->add_option("--out", map_out, "output directory");

  /* ---- simulate ---- */
  std::string sim_input = "-";
  SimOpts sim_sim;
  int sim_regions = 0;
  std::string sim_out;
  auto* si = app.add_subcommand("simulate",
                                "map one config and Monte Carlo it");
  si->add_option("input", sim_input, "netlist path or - for stdin");
  add_sim_flags(si, sim_sim);
  si->add_option("--D", sim_regions, "data regions (default: smallest fit)");
  si->add_option("--out", sim_out, "output directory");

  /* ---- adders ---- */
  std::string ad_kind = "qcla";
  int ad_n = 8, ad_m = 4;
  bool ad_verify = false;
  std::uint64_t ad_seed = 1;
  std::string ad_out;
  auto* ad = app.add_subcommand("adders", "generate QRCA/QCLA netlists");
  ad->add_option("--kind", ad_kind, "qrca | qcla");
  ad->add_option("--n", ad_n, "operand width in bits");
  ad->add_option("--m", ad_m, "sub-adder/block width");
  ad->add_flag("--verify", ad_verify, "randomized classical verification");
  ad->add_option("--seed", ad_seed, "verification seed");
  ad->add_option("--out", ad_out, "output directory");

  /* ---- shor ---- */
  std::vector<int> sh_ns;
  std::string sh_adder = "qcla";
  int sh_m = 4;
  std::string sh_qec = "every-gate";
  SimOpts sh_sim;
  int sh_limit = 64;
  std::string sh_out;
  auto* sh = app.add_subcommand("shor", "factoring resource estimate");
  sh->add_option("--n", sh_ns, "bits to factor (repeatable for a sweep)")
      ->required();
  sh->add_option("--adder", sh_adder, "qrca | qcla");
  sh->add_option("--m", sh_m, "sub-adder/block width");
  sh->add_option("--qec", sh_qec, "every-gate | edist:N | auto");
  add_sim_flags(sh, sh_sim);
  sh->add_option("--full-map-limit", sh_limit,
                 "largest kernel width laid out in full");
  sh->add_option("--out", sh_out, "output directory");

  /* ---- report ---- */
  std::vector<std::string> rp_inputs;
  std::string rp_format = "csv";
  std::string rp_out;
  auto* rp = app.add_subcommand("report", "merge metrics JSON into a table");
  rp->add_option("inputs", rp_inputs, "metrics JSON files")->required();
  rp->add_option("--format", rp_format, "json | csv")
      ->check(CLI::IsMember({"json", "csv"}));
  rp->add_option("--out", rp_out, "output directory");

  /* ---- run ---- */
  std::string rn_input;
  qcad::RandSpec rn_gen;
  rn_gen.qubits = 64;
  rn_gen.gates = 512;
  bool rn_use_gen = false;
  QecChoice rn_qec;
  SimOpts rn_sim;
  std::string rn_sweep_d, rn_aggr, rn_out = "qcad-out";
  auto* rn = app.add_subcommand("run", "full pipeline into an output dir");
  rn->add_option("input", rn_input, "netlist path (omit with --gen)");
  auto* rn_gen_flag =
      rn->add_flag("--gen", rn_use_gen, "generate the input circuit instead");
  rn->add_option("--qubits", rn_gen.qubits, "generated qubit count")
      ->needs(rn_gen_flag);
  rn->add_option("--gates", rn_gen.gates, "generated gate count")
      ->needs(rn_gen_flag);
  rn->add_option("--rent", rn_gen.rent, "generated locality")
      ->needs(rn_gen_flag);
  add_qec_flags(rn, rn_qec);
  add_sim_flags(rn, rn_sim);
  rn->add_option("--sweep-D", rn_sweep_d, "data regions, N or a:b:step");
  rn->add_option("--net-aggressiveness", rn_aggr,
                 "router provisioning multipliers");
  rn->add_option("--out", rn_out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kExitParse;
  }

  try {
    if (gen->parsed()) {
      try {
        gen_spec.validate();
      } catch (const std::invalid_argument& e) {
        std::cerr << "bad arguments: " << e.what() << "\n";
        return kExitParse;
      }
      return cmd_gen_random(gen_spec, gen_out);
    }
    if (oq->parsed())
      return cmd_optimize_qec(qec_input, qec_choice, qec_sim, qec_out);
    if (mp->parsed())
      return cmd_map(map_input, map_sim, map_sweep_d, map_sweep_m, map_aggr,
                     map_out);
    if (si->parsed())
      return cmd_simulate(sim_input, sim_sim, sim_regions, sim_out);
    if (ad->parsed())
      return cmd_adders(ad_kind, ad_n, ad_m, ad_verify, ad_seed, ad_out);
    if (sh->parsed())
      return cmd_shor(sh_ns, sh_adder, sh_m, sh_qec, sh_sim, sh_limit, sh_out);
    if (rp->parsed()) return cmd_report(rp_inputs, rp_format, rp_out);
    if (rn->parsed()) {
      if (!rn_use_gen && rn_input.empty()) {
        std::cerr << "run: give a netlist path or --gen\n";
        return kExitParse;
      }
      rn_gen.seed = rn_sim.seed;
      return cmd_run(rn_input, rn_gen, rn_use_gen, rn_qec, rn_sim, rn_sweep_d,
                     rn_aggr, rn_out);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
