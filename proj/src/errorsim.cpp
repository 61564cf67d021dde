#include "qcad/errorsim.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <limits>
#include <queue>
#include <stdexcept>
#include <thread>
#include <unordered_map>
#include <utility>

#include "qcad/rng.hpp"

namespace qcad {

namespace {

void push_event(ErrorTrace& tr, const QubitId* qs, int nq, double p,
                std::int64_t mult, ErrorKind kind, double time_us) {
  if (!(p >= 0.0 && p <= 1.0))
    throw std::invalid_argument("event probability must be in [0, 1]");
  if (mult < 1) throw std::invalid_argument("event multiplicity must be >= 1");
  if (nq < 1 || nq > 3) throw std::invalid_argument("events list 1..3 qubits");
  TraceOp op;
  op.kind = TraceOp::Kind::Event;
  op.error = kind;
  op.nq = static_cast<std::uint8_t>(nq);
  op.p = p;
  op.multiplicity = mult;
  op.time_us = time_us;
  for (int i = 0; i < nq; ++i) {
    if (qs[i] < 0) throw std::invalid_argument("negative qubit id in event");
    op.q[i] = qs[i];
    tr.num_qubits = std::max(tr.num_qubits, static_cast<std::size_t>(qs[i]) + 1);
  }
  tr.ops.push_back(op);
}

void push_merge(ErrorTrace& tr, QubitId a, QubitId b, double time_us) {
  if (a < 0 || b < 0 || a == b)
    throw std::invalid_argument("merge needs two distinct qubits");
  TraceOp op;
  op.kind = TraceOp::Kind::Merge;
  op.nq = 2;
  op.q[0] = a;
  op.q[1] = b;
  op.time_us = time_us;
  tr.num_qubits = std::max(
      tr.num_qubits, static_cast<std::size_t>(std::max(a, b)) + 1);
  tr.ops.push_back(op);
}

void push_marker(ErrorTrace& tr, QubitId q, double time_us) {
  if (q < 0) throw std::invalid_argument("negative qubit id in marker");
  TraceOp op;
  op.kind = TraceOp::Kind::Marker;
  op.nq = 1;
  op.q[0] = q;
  op.time_us = time_us;
  tr.num_qubits = std::max(tr.num_qubits, static_cast<std::size_t>(q) + 1);
  tr.ops.push_back(op);
}

}  // namespace

void ErrorTrace::add_event(std::initializer_list<QubitId> qs, double p,
                           std::int64_t multiplicity, ErrorKind kind,
                           double time_us) {
  push_event(*this, qs.begin(), static_cast<int>(qs.size()), p, multiplicity,
             kind, time_us);
}

void ErrorTrace::add_merge(QubitId a, QubitId b, double time_us) {
  push_merge(*this, a, b, time_us);
}

void ErrorTrace::add_marker(QubitId q, double time_us) {
  push_marker(*this, q, time_us);
}

std::int64_t ErrorTrace::event_count() const {
  std::int64_t n = 0;
  for (const auto& op : ops)
    if (op.kind == TraceOp::Kind::Event) n += op.multiplicity;
  return n;
}

std::size_t ErrorTrace::marker_count() const {
  std::size_t n = 0;
  for (const auto& op : ops)
    if (op.kind == TraceOp::Kind::Marker) ++n;
  return n;
}

namespace {

/* Expansion of one schedule into trace ops, dataflow order. */
struct TraceWriter {
  const TechModel& tech;
  ErrorTrace& out;
  double p_block;   /* zero-ancilla block residual infidelity */
  double p_tstate;  /* T-state residual infidelity */
  double p_epr;     /* purified EPR channel failure */
  double p_intra;   /* intra-region alignment move */

  TraceWriter(const RegionLayout& lay, ErrorTrace& tr)
      : tech(lay.tech), out(tr) {
    const AncillaFactory fac = AncillaFactory::make(lay.config.factory);
    p_block = fac.output_infidelity(tech.errors);
    p_tstate = std::min(1.0, p_block * tech.t_factory_infidelity_mult);
    p_epr = 1.0 - purify(tech.router.epr_base_fidelity,
                         tech.router.purify_rounds);
    p_intra = channel_errors(lay.intra_region_straights(), 1, 0.0,
                             tech.errors).probability;
  }

  void counts(const QubitId* qs, int nq, const PhysOpCounts& n, double t) {
    const ErrorSet& es = tech.errors;
    if (n.one_qubit > 0)
      push_event(out, qs, nq, es.one_qubit.p_fail, n.one_qubit,
                 ErrorKind::Gate, t);
    if (n.two_qubit > 0)
      push_event(out, qs, nq, es.two_qubit.p_fail, n.two_qubit,
                 ErrorKind::Gate, t);
    if (n.prep > 0)
      push_event(out, qs, nq, es.prep.p_fail, n.prep, ErrorKind::Gate, t);
    if (n.measure > 0)
      push_event(out, qs, nq, es.measure.p_fail, n.measure, ErrorKind::Gate,
                 t);
  }

  void gate(const Gate& g, double t) {
    const QubitId* qs = g.operands;
    const int nq = g.arity;
    if (nq >= 2) {
      push_merge(out, qs[0], qs[1], t);
      if (nq == 3) push_merge(out, qs[0], qs[2], t);
      if (p_intra > 0.0)
        push_event(out, qs, nq, p_intra, 1, ErrorKind::BallisticChannel, t);
    }
    counts(qs, nq, tech.costs.cost(g.kind), t);
    switch (g.kind) {
      case GateKind::T:
        if (p_tstate > 0.0)
          push_event(out, qs, nq, p_tstate, 1, ErrorKind::Gate, t);
        break;
      case GateKind::Toffoli:
        if (p_tstate > 0.0)
          push_event(out, qs, nq, p_tstate, 7, ErrorKind::Gate, t);
        break;
      case GateKind::Correct:
        if (p_block > 0.0 && tech.costs.correction_zero_blocks > 0)
          push_event(out, qs, nq, p_block, tech.costs.correction_zero_blocks,
                     ErrorKind::Gate, t);
        push_marker(out, qs[0], t);
        break;
      default:
        break;
    }
  }

  void correction(QubitId q, double t) {
    counts(&q, 1, tech.costs.cost(GateKind::Correct), t);
    if (p_block > 0.0 && tech.costs.correction_zero_blocks > 0)
      push_event(out, &q, 1, p_block, tech.costs.correction_zero_blocks,
                 ErrorKind::Gate, t);
    push_marker(out, q, t);
  }

  void teleport(QubitId q, double t) {
    if (p_epr > 0.0)
      push_event(out, &q, 1, p_epr, 1, ErrorKind::TeleportChannel, t);
    counts(&q, 1, tech.costs.teleport, t);
  }

  void idle(QubitId q, std::int64_t slots, double t) {
    const double p = tech.errors.idle_rate_per_us;
    if (p > 0.0 && slots >= 1)
      push_event(out, &q, 1, p, slots, ErrorKind::Idle, t);
  }
};

struct Interval {
  double from = 0.0;
  double to = 0.0;
};

}  // namespace

ErrorTrace build_error_trace(const Circuit& c, const MappedSchedule& s,
                             const RegionLayout& layout) {
  if (c.hierarchical())
    throw std::invalid_argument("error trace needs a flat circuit");
  if (s.gates.size() != c.gates.size())
    throw std::invalid_argument("schedule does not match circuit");

  ErrorTrace tr;
  tr.num_qubits = c.qubits.size();
  TraceWriter w(layout, tr);

  /* Idle gaps per qubit: complement of gate/relocation activity, split at
   * maintenance corrections so their windows close over the right idles. */
  struct IdleItem {
    QubitId q;
    std::int64_t slots;
  };
  std::vector<IdleItem> idles;
  std::vector<double> idle_time;
  {
    const std::size_t nq = c.qubits.size();
    std::vector<std::vector<Interval>> busy(nq);
    for (const Gate& g : c.gates) {
      const auto& pl = s.gates[static_cast<std::size_t>(g.id)];
      for (QubitId q : g.qubits())
        busy[static_cast<std::size_t>(q)].push_back(
            {pl.start_us, pl.start_us + pl.duration_us});
    }
    for (const auto& r : s.relocations)
      busy[static_cast<std::size_t>(r.qubit)].push_back(
          {r.depart_us, r.arrive_us});
    std::vector<std::vector<double>> cuts(nq);
    for (const auto& ic : s.idle_corrections)
      cuts[static_cast<std::size_t>(ic.qubit)].push_back(ic.time_us);

    for (std::size_t q = 0; q < nq; ++q) {
      auto& iv = busy[q];
      std::sort(iv.begin(), iv.end(), [](const Interval& a, const Interval& b) {
        return a.from < b.from || (a.from == b.from && a.to < b.to);
      });
      auto& ct = cuts[q];
      std::sort(ct.begin(), ct.end());
      std::size_t ci = 0;
      double cursor = 0.0;
      auto flush_gap = [&](double hi) {
        double lo = cursor;
        while (ci < ct.size() && ct[ci] <= hi) {
          if (ct[ci] > lo) {
            const auto slots =
                static_cast<std::int64_t>(std::floor(ct[ci] - lo + 1e-9));
            if (slots >= 1) {
              idles.push_back({static_cast<QubitId>(q), slots});
              idle_time.push_back(ct[ci]);
            }
            lo = ct[ci];
          }
          ++ci;
        }
        if (hi > lo) {
          const auto slots =
              static_cast<std::int64_t>(std::floor(hi - lo + 1e-9));
          if (slots >= 1) {
            idles.push_back({static_cast<QubitId>(q), slots});
            idle_time.push_back(hi);
          }
        }
      };
      for (const Interval& b : iv) {
        if (b.from > cursor) flush_gap(b.from);
        cursor = std::max(cursor, b.to);
      }
      if (s.makespan_us > cursor) flush_gap(s.makespan_us);
      /* corrections after all activity still close their windows */
      while (ci < ct.size()) ++ci;
    }
  }

  /* Dataflow order: at equal timestamps idles land first, then teleport
   * arrivals, then maintenance corrections, then gate bundles. */
  struct Item {
    double t;
    int rank;
    std::int64_t ord;
    std::size_t idx;
  };
  std::vector<Item> items;
  items.reserve(idles.size() + s.relocations.size() +
                s.idle_corrections.size() + c.gates.size());
  for (std::size_t i = 0; i < idles.size(); ++i)
    items.push_back({idle_time[i], 0, idles[i].q, i});
  for (std::size_t i = 0; i < s.relocations.size(); ++i)
    items.push_back(
        {s.relocations[i].arrive_us, 1, static_cast<std::int64_t>(i), i});
  for (std::size_t i = 0; i < s.idle_corrections.size(); ++i)
    items.push_back(
        {s.idle_corrections[i].time_us, 2, static_cast<std::int64_t>(i), i});
  for (const Gate& g : c.gates)
    items.push_back({s.gates[static_cast<std::size_t>(g.id)].start_us, 3,
                     g.id, static_cast<std::size_t>(g.id)});
  std::sort(items.begin(), items.end(), [](const Item& a, const Item& b) {
    if (a.t != b.t) return a.t < b.t;
    if (a.rank != b.rank) return a.rank < b.rank;
    return a.ord < b.ord;
  });

  for (const Item& it : items) {
    switch (it.rank) {
      case 0:
        w.idle(idles[it.idx].q, idles[it.idx].slots, it.t);
        break;
      case 1:
        w.teleport(s.relocations[it.idx].qubit, it.t);
        break;
      case 2:
        w.correction(s.idle_corrections[it.idx].qubit, it.t);
        break;
      default:
        w.gate(c.gates[it.idx], it.t);
        break;
    }
  }
  return tr;
}

namespace {

struct EventClass {
  double log1m = 0.0;
  std::vector<std::uint32_t> op;      /* trace op index per member */
  std::vector<std::uint64_t> prefix;  /* first slot of each member */
  std::uint64_t total = 0;            /* Bernoulli slots in the class */
};

struct TracePlan {
  const ErrorTrace* trace = nullptr;
  std::vector<EventClass> classes;
  std::vector<std::vector<std::uint32_t>> chain; /* merge/marker ops per qubit */
};

TracePlan make_plan(const ErrorTrace& t) {
  TracePlan plan;
  plan.trace = &t;
  plan.chain.resize(t.num_qubits);
  std::unordered_map<std::uint64_t, std::size_t> class_of;
  for (std::size_t i = 0; i < t.ops.size(); ++i) {
    const TraceOp& op = t.ops[i];
    const auto pos = static_cast<std::uint32_t>(i);
    switch (op.kind) {
      case TraceOp::Kind::Event: {
        if (op.p <= 0.0 || op.multiplicity < 1) break;
        const std::uint64_t key = std::bit_cast<std::uint64_t>(op.p);
        auto [it, fresh] = class_of.try_emplace(key, plan.classes.size());
        if (fresh) {
          plan.classes.emplace_back();
          plan.classes.back().log1m =
              op.p >= 1.0 ? -std::numeric_limits<double>::infinity()
                          : std::log1p(-op.p);
        }
        EventClass& cls = plan.classes[it->second];
        cls.op.push_back(pos);
        cls.prefix.push_back(cls.total);
        cls.total += static_cast<std::uint64_t>(op.multiplicity);
        break;
      }
      case TraceOp::Kind::Merge:
        plan.chain[static_cast<std::size_t>(op.q[0])].push_back(pos);
        plan.chain[static_cast<std::size_t>(op.q[1])].push_back(pos);
        break;
      case TraceOp::Kind::Marker:
        plan.chain[static_cast<std::size_t>(op.q[0])].push_back(pos);
        break;
    }
  }
  return plan;
}

/* Per-thread trial state: sparse dirty set advanced lazily along each
 * qubit's merge/marker chain, so clean trials cost O(#classes). */
struct TrialState {
  const TracePlan& plan;
  std::vector<std::uint32_t> firings;
  std::vector<std::uint64_t> dirty_epoch;
  std::vector<std::uint32_t> cursor; /* index into chain[q] */
  std::uint64_t epoch = 0;
  std::priority_queue<std::pair<std::uint32_t, QubitId>,
                      std::vector<std::pair<std::uint32_t, QubitId>>,
                      std::greater<>>
      heap;
  std::uint64_t successes = 0;
  std::uint64_t x = 0, z = 0, both = 0;

  explicit TrialState(const TracePlan& p)
      : plan(p),
        dirty_epoch(p.trace->num_qubits, 0),
        cursor(p.trace->num_qubits, 0) {}

  bool is_dirty(QubitId q) const {
    return dirty_epoch[static_cast<std::size_t>(q)] == epoch;
  }

  void make_dirty(QubitId q, std::uint32_t after_pos) {
    const auto qi = static_cast<std::size_t>(q);
    dirty_epoch[qi] = epoch;
    const auto& ch = plan.chain[qi];
    const auto it = std::upper_bound(ch.begin(), ch.end(), after_pos);
    cursor[qi] = static_cast<std::uint32_t>(it - ch.begin());
    if (it != ch.end()) heap.emplace(*it, q);
  }

  void advance_to(std::uint32_t pos) {
    while (!heap.empty() && heap.top().first <= pos) {
      const auto [at, q] = heap.top();
      heap.pop();
      const auto qi = static_cast<std::size_t>(q);
      const auto& ch = plan.chain[qi];
      if (dirty_epoch[qi] != epoch || cursor[qi] >= ch.size() ||
          ch[cursor[qi]] != at)
        continue; /* stale heap entry */
      const TraceOp& op = plan.trace->ops[at];
      ++cursor[qi];
      if (op.kind == TraceOp::Kind::Marker) {
        dirty_epoch[qi] = 0; /* window closed, clean again */
        continue;
      }
      if (cursor[qi] < ch.size()) heap.emplace(ch[cursor[qi]], q);
      const QubitId other = op.q[0] == q ? op.q[1] : op.q[0];
      if (!is_dirty(other)) make_dirty(other, at);
    }
  }

  void run(std::uint64_t seed, std::uint64_t trial) {
    Rng rng = Rng::substream(seed, trial);
    firings.clear();
    for (const EventClass& cls : plan.classes) {
      std::uint64_t slot = geometric_skip(rng, cls.log1m);
      while (slot < cls.total) {
        const auto at = static_cast<std::size_t>(
            std::upper_bound(cls.prefix.begin(), cls.prefix.end(), slot) -
            cls.prefix.begin() - 1);
        firings.push_back(cls.op[at]);
        switch (rng.below(3)) {
          case 0: ++x; break;
          case 1: ++z; break;
          default: ++both; break;
        }
        const std::uint64_t skip = geometric_skip(rng, cls.log1m);
        if (skip == ~std::uint64_t{0}) break;
        slot += 1 + skip;
      }
    }
    if (firings.empty()) {
      ++successes;
      return;
    }
    std::sort(firings.begin(), firings.end());
    ++epoch;
    heap = {};
    std::size_t i = 0;
    while (i < firings.size()) {
      const std::uint32_t pos = firings[i];
      std::size_t j = i;
      while (j < firings.size() && firings[j] == pos) ++j;
      advance_to(pos);
      const TraceOp& op = plan.trace->ops[pos];
      if (j - i >= 2) return; /* two hits inside one bundle */
      for (int k = 0; k < op.nq; ++k)
        if (is_dirty(op.q[k])) return; /* second hit in an open window */
      for (int k = 0; k < op.nq; ++k) make_dirty(op.q[k], pos);
      i = j;
    }
    ++successes;
  }
};

}  // namespace

McResult mc_run(const ErrorTrace& t, std::uint64_t trials, std::uint64_t seed,
                int threads) {
  if (trials == 0) throw std::invalid_argument("trials must be positive");
  if (threads < 1) throw std::invalid_argument("threads must be positive");
  const TracePlan plan = make_plan(t);

  const auto nthreads =
      static_cast<std::uint64_t>(threads) > trials
          ? trials
          : static_cast<std::uint64_t>(threads);
  std::vector<TrialState> states;
  states.reserve(nthreads);
  for (std::uint64_t i = 0; i < nthreads; ++i) states.emplace_back(plan);

  auto work = [&](std::uint64_t lo, std::uint64_t hi, TrialState& st) {
    for (std::uint64_t trial = lo; trial < hi; ++trial) st.run(seed, trial);
  };
  if (nthreads == 1) {
    work(0, trials, states[0]);
  } else {
    std::vector<std::thread> pool;
    const std::uint64_t base = trials / nthreads;
    const std::uint64_t rem = trials % nthreads;
    std::uint64_t lo = 0;
    for (std::uint64_t i = 0; i < nthreads; ++i) {
      const std::uint64_t hi = lo + base + (i < rem ? 1 : 0);
      pool.emplace_back(work, lo, hi, std::ref(states[i]));
      lo = hi;
    }
    for (auto& th : pool) th.join();
  }

  McResult r;
  r.trials = trials;
  for (const TrialState& st : states) {
    r.successes += st.successes;
    r.x_errors += st.x;
    r.z_errors += st.z;
    r.both_errors += st.both;
  }
  const double n = static_cast<double>(trials);
  const double ph = static_cast<double>(r.successes) / n;
  r.p_success = ph;
  const double z = 1.959964; /* 95% Wilson interval */
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = (ph + z2 / (2.0 * n)) / denom;
  const double half =
      z * std::sqrt(ph * (1.0 - ph) / n + z2 / (4.0 * n * n)) / denom;
  r.ci_low = std::max(0.0, center - half);
  r.ci_high = std::min(1.0, center + half);
  return r;
}

double mapped_success(const Circuit& c, const CorrectionPlacement& placement,
                      const DatapathConfig& cfg, const TechModel& tech,
                      std::uint64_t trials, std::uint64_t seed) {
  const Circuit with = apply_placement(c, placement);
  const RegionLayout lay = instantiate(cfg, tech);
  const Assignment asg = partition(with, lay);
  const MappedSchedule s = schedule(with, lay, asg);
  const ErrorTrace trace = build_error_trace(with, s, lay);
  return mc_run(trace, trials, seed).p_success;
}

SuccessEval make_success_eval(const DatapathConfig& cfg, const TechModel& tech,
                              std::uint64_t trials, std::uint64_t seed) {
  return [cfg, tech, trials, seed](const Circuit& c,
                                   const CorrectionPlacement& p) {
    return mapped_success(c, p, cfg, tech, trials, seed);
  };
}

}  // namespace qcad
