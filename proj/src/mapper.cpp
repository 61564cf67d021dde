#include "qcad/mapper.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <queue>
#include <set>

#include "qcad/partition.hpp"

namespace qcad {

namespace {

std::size_t data_capacity(const RegionLayout& lay) {
  std::size_t cap = 0;
  for (const Region& r : lay.regions)
    if (r.type == RegionType::Data) cap += static_cast<std::size_t>(r.capacity);
  return cap;
}

void bisect_recurse(const InteractionGraph& g, const RegionLayout& lay,
                    std::size_t lo, std::size_t hi, std::vector<int> verts,
                    std::vector<int>& region_of) {
  if (verts.empty()) return;
  if (hi - lo == 1) {
    for (int v : verts) region_of[v] = static_cast<int>(lo);
    return;
  }
  std::size_t mid = lo + (hi - lo) / 2;
  double cap_a = 0.0, cap_b = 0.0;
  for (std::size_t i = lo; i < mid; ++i) cap_a += lay.regions[i].capacity;
  for (std::size_t i = mid; i < hi; ++i) cap_b += lay.regions[i].capacity;
  std::size_t n = verts.size();
  auto want = static_cast<std::size_t>(
      std::llround(n * (cap_a / std::max(1.0, cap_a + cap_b))));
  std::size_t lo_bound =
      n > static_cast<std::size_t>(cap_b) ? n - static_cast<std::size_t>(cap_b)
                                          : 0;
  std::size_t hi_bound = std::min(n, static_cast<std::size_t>(cap_a));
  std::size_t side0 = std::clamp(want, lo_bound, hi_bound);

  std::vector<int> labels = fm_bisect(g, verts, side0);
  std::vector<int> a, b;
  for (std::size_t i = 0; i < verts.size(); ++i)
    (labels[i] == 0 ? a : b).push_back(verts[i]);
  bisect_recurse(g, lay, lo, mid, std::move(a), region_of);
  bisect_recurse(g, lay, mid, hi, std::move(b), region_of);
}

}  // namespace

Assignment partition(const Circuit& c, const RegionLayout& layout) {
  if (c.hierarchical())
    throw std::invalid_argument("partition requires a flat circuit");
  std::size_t n = c.qubits.size();
  if (n > layout.total_capacity())
    throw std::invalid_argument(
        "insufficient capacity: " + std::to_string(n) + " qubits, " +
        std::to_string(layout.total_capacity()) + " slots");

  InteractionGraph g = InteractionGraph::from_circuit(c);
  Assignment asg;
  asg.region_of.assign(n, 0);

  /* Fill data regions first; spill the remainder into memory regions. */
  std::vector<int> verts(n);
  for (std::size_t i = 0; i < n; ++i) verts[i] = static_cast<int>(i);
  std::size_t dcap = data_capacity(layout);
  std::size_t d = static_cast<std::size_t>(layout.config.data_regions);
  if (n <= dcap) {
    bisect_recurse(g, layout, 0, d, std::move(verts), asg.region_of);
  } else {
    /* Keep the most-connected qubits in compute; spill the rest. */
    std::size_t spill = n - dcap;
    std::vector<std::pair<double, int>> by_weight;
    for (std::size_t i = 0; i < n; ++i) {
      double w = 0.0;
      for (auto& [v, wt] : g.adj[i]) {
        (void)v;
        w += wt;
      }
      by_weight.emplace_back(w, static_cast<int>(i));
    }
    std::sort(by_weight.begin(), by_weight.end(),
              [](const auto& a, const auto& b) {
                if (a.first != b.first) return a.first > b.first;
                return a.second < b.second;
              });
    std::vector<int> keep, park;
    for (std::size_t i = 0; i < n; ++i)
      (i < n - spill ? keep : park).push_back(by_weight[i].second);
    std::sort(keep.begin(), keep.end());
    std::sort(park.begin(), park.end());
    bisect_recurse(g, layout, 0, d, std::move(keep), asg.region_of);
    bisect_recurse(g, layout, d, layout.size(), std::move(park),
                   asg.region_of);
  }

  double cut = 0.0;
  for (std::size_t u = 0; u < n; ++u)
    for (auto& [v, w] : g.adj[u])
      if (u < static_cast<std::size_t>(v) &&
          asg.region_of[u] != asg.region_of[v])
        cut += w;
  asg.cut_weight = static_cast<std::size_t>(std::llround(cut));
  return asg;
}

namespace {

struct TokenBucket {
  double rate = 0.0;      /* blocks per µs */
  double cap = 0.0;       /* banked blocks */
  double tokens = 0.0;
  double at = 0.0;

  void advance(double t) {
    if (t <= at) return;
    tokens = std::min(cap, tokens + rate * (t - at));
    at = t;
  }
  /* earliest time >= t the bucket holds `need` blocks */
  double earliest(double t, double need) const {
    double tok = std::min(cap, tokens + rate * (std::max(t, at) - at));
    if (tok >= need) return std::max(t, at);
    if (rate <= 0.0) return std::numeric_limits<double>::infinity();
    return std::max(t, at) + (need - tok) / rate;
  }
  void consume(double t, double need) {
    advance(t);
    tokens -= need; /* may briefly dip below zero on ties; harmless */
  }
};

class Scheduler {
 public:
  Scheduler(const Circuit& c, const RegionLayout& lay, const Assignment& asg,
            const NetworkSizing* prov)
      : c_(c), lay_(lay), asg_(asg), prov_(prov), tech_(lay.tech) {}

  MappedSchedule run();

 private:
  const Circuit& c_;
  const RegionLayout& lay_;
  const Assignment& asg_;
  const NetworkSizing* prov_;
  const TechModel& tech_;

  MappedSchedule out_;
  Dag dag_;
  std::vector<double> crit_;
  std::vector<int> indeg_;
  std::vector<double> finish_;
  std::vector<int> where_;
  std::vector<double> avail_;
  std::vector<double> dwell_start_;
  std::vector<std::vector<double>> slot_free_;
  std::vector<TokenBucket> bucket_;
  std::vector<std::map<double, int>> occ_;

  bool qalypso_ = false;
  bool has_memory_ = false;
  double teleport_us_ = 0.0;
  double park_threshold_us_ = 0.0;
  double intra_move_us_ = 0.0;
  double t_token_cost_ = 0.0;

  int capacity(int r) const { return lay_.regions[r].capacity; }
  bool is_memory(int r) const {
    return lay_.regions[r].type == RegionType::Memory;
  }

  void claim(int r, double t) { occ_[r][t] += 1; }
  void release(int r, double t) { occ_[r][t] -= 1; }

  /* true if `extra` more residents fit in r from time `from` onward */
  bool can_host(int r, double from, int extra) const {
    int run = 0, peak = 0;
    for (const auto& [t, d] : occ_[r]) {
      run += d;
      if (t >= from) peak = std::max(peak, run);
    }
    peak = std::max(peak, run); /* steady-state tail */
    /* residents at `from` itself */
    int at_from = 0;
    for (const auto& [t, d] : occ_[r])
      if (t <= from) at_from += d;
    peak = std::max(peak, at_from);
    return peak + extra <= capacity(r);
  }

  /* earliest T >= lower such that `extra` more residents fit in r from T
   * onward; +inf when the region is full at steady state.  The peak over
   * [T, inf) only shrinks as T grows, so the first admissible occupancy
   * segment stays admissible. */
  double earliest_host(int r, double lower, int extra) const {
    const int cap = capacity(r) - extra;
    if (cap < 0) return std::numeric_limits<double>::infinity();
    std::vector<std::pair<double, int>> runs; /* (time, occupancy after) */
    runs.reserve(occ_[r].size());
    int run = 0;
    for (const auto& [t, d] : occ_[r]) {
      run += d;
      runs.emplace_back(t, run);
    }
    double best = std::numeric_limits<double>::infinity();
    int suffix = 0;
    std::size_t reached = runs.size();
    for (std::size_t i = runs.size(); i-- > 0;) {
      suffix = std::max(suffix, runs[i].second);
      if (suffix > cap) break;
      best = runs[i].first;
      reached = i;
    }
    if (reached == 0 || runs.empty()) best = 0.0; /* admissible from the start */
    if (!std::isfinite(best)) return best;
    return std::max(best, lower);
  }

  std::vector<int> route_cells(int a, int b) const {
    std::vector<int> cells;
    const Region& ra = lay_.regions[a];
    const Region& rb = lay_.regions[b];
    int c0 = ra.col, c1 = rb.col, r0 = ra.row, r1 = rb.row;
    for (int col = c0;; col += c1 > c0 ? 1 : -1) {
      int idx = lay_.region_at(r0, col);
      if (idx >= 0) cells.push_back(idx);
      if (col == c1) break;
    }
    for (int row = r0; row != r1;) {
      row += r1 > r0 ? 1 : -1;
      int idx = lay_.region_at(row, c1);
      if (idx >= 0) cells.push_back(idx);
    }
    return cells;
  }

  int router_load_at(int r, double t) const {
    int load = 0;
    for (const LoadEvent& e : out_.router_load[r])
      if (e.time_us <= t) load += e.delta;
    return load;
  }

  double congestion_penalty(const std::vector<int>& cells, double dep) const {
    if (!prov_) return 0.0;
    int saturated = 0;
    for (int r : cells) {
      int cap = prov_->provisioned[r];
      if (router_load_at(r, dep) >= cap) ++saturated;
    }
    return saturated * tech_.router.epr_gen_latency_us;
  }

  void record_connection(const std::vector<int>& cells, double dep,
                         double arr) {
    for (int r : cells) {
      out_.router_load[r].push_back({dep, +1});
      out_.router_load[r].push_back({arr, -1});
    }
  }

  void move_qubit(QubitId q, int to, double dep, double arr) {
    int from = where_[q];
    out_.qubit_timeline[q].push_back({from, dwell_start_[q], dep});
    release(from, dep);
    claim(to, arr);
    auto cells = route_cells(from, to);
    record_connection(cells, dep, arr);
    out_.relocations.push_back({q, from, to, dep, arr});
    ++out_.teleport_count;
    where_[q] = to;
    dwell_start_[q] = arr;
    avail_[q] = std::max(avail_[q], arr);
  }

  double token_cost(const Gate& g) const {
    switch (g.kind) {
      case GateKind::Correct:
        return tech_.costs.correction_zero_blocks;
      case GateKind::T:
        return t_token_cost_;
      case GateKind::Toffoli:
        return 7.0 * t_token_cost_;
      default:
        return 0.0;
    }
  }

  void log_demand(const Gate& g, int region, double t) {
    switch (g.kind) {
      case GateKind::Correct:
        out_.zero_demand[region].push_back(
            {t, double(tech_.costs.correction_zero_blocks)});
        break;
      case GateKind::T:
        out_.t_demand[region].push_back({t, 1.0});
        break;
      case GateKind::Toffoli:
        out_.t_demand[region].push_back({t, 7.0});
        break;
      default:
        break;
    }
  }

  bool try_evict(int r, double from, int extra, QubitId skip0, QubitId skip1,
                 QubitId skip2, double& ready);
  int pick_region(const Gate& g, double t_data, bool& evicted,
                  double& not_before);
  void dispatch(const Gate& g);
  void finalize();
};

bool Scheduler::try_evict(int r, double from, int extra, QubitId skip0,
                          QubitId skip1, QubitId skip2, double& ready) {
  ready = from;
  int guard = capacity(r) + 1;
  for (;;) {
    double host = earliest_host(r, ready, extra);
    if (std::isfinite(host)) {
      ready = host;
      return true;
    }
    if (guard-- <= 0) return false;

    /* oldest-idle resident not involved in the current gate; a busy one is
     * evicted once it frees, pushing the gate's start out to that point */
    QubitId victim = -1;
    for (QubitId q = 0; q < static_cast<QubitId>(where_.size()); ++q) {
      if (where_[q] != r || q == skip0 || q == skip1 || q == skip2) continue;
      if (victim < 0 || avail_[q] < avail_[victim] ||
          (avail_[q] == avail_[victim] && q < victim))
        victim = q;
    }
    if (victim < 0) return false;

    /* soonest-available region with room: memory preferred, then other
     * data; departure slips to whenever the destination has a free slot */
    int dest = -1;
    double dest_dep = 0.0;
    for (int pass = 0; pass < 2 && dest < 0; ++pass) {
      double best_dep = std::numeric_limits<double>::infinity();
      int best_dist = std::numeric_limits<int>::max();
      for (std::size_t i = 0; i < lay_.size(); ++i) {
        if (static_cast<int>(i) == r) continue;
        bool mem = is_memory(static_cast<int>(i));
        if (pass == 0 ? !mem : mem) continue;
        double arr = earliest_host(static_cast<int>(i), avail_[victim], 1);
        if (!std::isfinite(arr)) continue;
        int dist = lay_.route_straights(r, i);
        if (arr < best_dep || (arr == best_dep && dist < best_dist)) {
          best_dep = arr;
          best_dist = dist;
          dest = static_cast<int>(i);
          dest_dep = arr;
        }
      }
    }
    if (dest < 0) return false;
    move_qubit(victim, dest, std::max(0.0, dest_dep - teleport_us_), dest_dep);
  }
}

int Scheduler::pick_region(const Gate& g, double t_data, bool& evicted,
                           double& not_before) {
  bool needs_tsite = lay_.config.policy == TGatePolicy::DesignatedSites &&
                     (g.kind == GateKind::T || g.kind == GateKind::Toffoli);
  auto ops = g.qubits();

  std::vector<std::pair<int, int>> cands; /* (distance, region) */
  for (std::size_t i = 0; i < lay_.size(); ++i) {
    const Region& r = lay_.regions[i];
    if (r.type != RegionType::Data) continue;
    if (needs_tsite && !r.t_site) continue;
    int dist = 0;
    for (QubitId q : ops) dist += lay_.route_straights(where_[q], i);
    cands.emplace_back(dist, static_cast<int>(i));
  }
  std::sort(cands.begin(), cands.end());
  if (cands.empty())
    throw MapError("no eligible region for gate " + std::to_string(g.id), 0.0);

  double probe = 0.0;
  for (QubitId q : ops) probe = std::max(probe, avail_[q]);

  /* earliest possible operand arrival if the gate ran in region r */
  auto arrival_lb = [&](int r) {
    double t = t_data;
    for (QubitId q : ops) t = std::max(t, avail_[q]);
    return t;
  };

  evicted = false;
  not_before = probe;

  /* first choice: the region that can take the operands soonest as-is */
  int best_r = -1;
  double best_t = std::numeric_limits<double>::infinity();
  for (auto [dist, r] : cands) {
    (void)dist;
    int movers = 0;
    for (QubitId q : ops)
      if (where_[q] != r) ++movers;
    if (movers == 0) { /* co-located: always soonest, and distance-first */
      best_r = r;
      best_t = arrival_lb(r);
      break;
    }
    double t = earliest_host(r, arrival_lb(r), movers);
    if (t < best_t) {
      best_t = t;
      best_r = r;
    }
  }
  if (best_r >= 0 && std::isfinite(best_t)) {
    not_before = std::max(not_before, best_t);
    return best_r;
  }

  /* every candidate is full at steady state: evict on the closest */
  for (auto [dist, r] : cands) {
    (void)dist;
    int movers = 0;
    for (QubitId q : ops)
      if (where_[q] != r) ++movers;
    QubitId s0 = ops.size() > 0 ? ops[0] : -1;
    QubitId s1 = ops.size() > 1 ? ops[1] : -1;
    QubitId s2 = ops.size() > 2 ? ops[2] : -1;
    double ready = 0.0;
    if (try_evict(r, arrival_lb(r), movers, s0, s1, s2, ready)) {
      evicted = true;
      not_before = std::max(not_before, ready);
      return r;
    }
  }
  throw MapError("deadlock: no region can host gate " + std::to_string(g.id) +
                     " at t=" + std::to_string(probe),
                 probe);
}

void Scheduler::dispatch(const Gate& g) {
  auto ops = g.qubits();
  double dur = tech_.costs.logical_duration_us(g.kind, tech_.errors);

  /* corrections run where the qubit sits, consuming ancilla blocks */
  if (g.kind == GateKind::Correct) {
    QubitId q = ops[0];
    int r = where_[q];
    double t0 = avail_[q];
    for (GateId p : dag_.preds[g.id]) t0 = std::max(t0, finish_[p]);
    double t = t0;
    if (!qalypso_) {
      t = bucket_[r].earliest(t0, token_cost(g));
      if (!std::isfinite(t))
        throw MapError("region " + std::to_string(r) +
                           " has no ancilla generators for a correction",
                       t0);
      out_.ancilla_stall_us += t - t0;
      bucket_[r].consume(t, token_cost(g));
    }
    log_demand(g, r, t);
    out_.gates[g.id] = {r, t, dur};
    finish_[g.id] = t + dur;
    avail_[q] = t + dur;
    return;
  }

  double t_data = 0.0;
  for (GateId p : dag_.preds[g.id]) t_data = std::max(t_data, finish_[p]);

  bool evicted = false;
  double not_before = 0.0;
  int target = pick_region(g, t_data, evicted, not_before);
  if (ops.size() >= 2) dur += intra_move_us_;

  /* lower bound with just-in-time transport: EPR setup runs in the routers
   * ahead of time, so an unsaturated teleport costs no qubit latency */
  double lb = std::max(t_data, not_before);
  for (QubitId q : ops) {
    lb = std::max(lb, avail_[q]);
  }
  double slot = *std::min_element(slot_free_[target].begin(),
                                  slot_free_[target].end());
  double t_start = std::max(lb, slot);
  double pre_token = t_start;
  if (!qalypso_ && token_cost(g) > 0.0) {
    t_start = bucket_[target].earliest(t_start, token_cost(g));
    if (!std::isfinite(t_start))
      throw MapError("region " + std::to_string(target) +
                         " has no ancilla generators for gate " +
                         std::to_string(g.id),
                     pre_token);
  }

  /* congestion pass: arriving operands may pay per saturated router */
  if (prov_) {
    for (int iter = 0; iter < 3; ++iter) {
      double worst = t_start;
      for (QubitId q : ops) {
        if (where_[q] == target) continue;
        double dep = std::max(0.0, t_start - teleport_us_);
        double pen =
            congestion_penalty(route_cells(where_[q], target), dep);
        worst = std::max(worst, t_start + pen);
      }
      if (worst <= t_start + 1e-9) break;
      t_start = worst;
    }
  }

  if (!qalypso_ && token_cost(g) > 0.0) {
    double t2 = bucket_[target].earliest(t_start, token_cost(g));
    out_.ancilla_stall_us += std::max(0.0, t2 - std::max(pre_token, lb));
    t_start = t2;
    bucket_[target].consume(t_start, token_cost(g));
  }
  log_demand(g, target, t_start);

  /* transports: park long-idle operands in memory on the way */
  for (QubitId q : ops) {
    if (where_[q] == target) continue;
    double gap = t_start - avail_[q];
    double dep = std::max(0.0, t_start - teleport_us_);
    if (has_memory_ && !is_memory(where_[q]) &&
        gap >= std::max(park_threshold_us_, 2.0 * teleport_us_ + 1.0)) {
      /* nearest memory region with room for the parked dwell */
      int mem = -1;
      int best = std::numeric_limits<int>::max();
      for (std::size_t i = 0; i < lay_.size(); ++i) {
        if (!is_memory(static_cast<int>(i))) continue;
        if (!can_host(static_cast<int>(i), avail_[q], 1)) continue;
        int dist = lay_.route_straights(where_[q], i);
        if (dist < best) {
          best = dist;
          mem = static_cast<int>(i);
        }
      }
      if (mem >= 0) {
        move_qubit(q, mem, std::max(0.0, avail_[q] - teleport_us_),
                   avail_[q]);
        dep = std::max(0.0, t_start - teleport_us_);
      }
    }
    move_qubit(q, target, dep, t_start);
  }

  auto slot_it =
      std::min_element(slot_free_[target].begin(), slot_free_[target].end());
  *slot_it = t_start + dur;
  out_.gates[g.id] = {target, t_start, dur};
  finish_[g.id] = t_start + dur;
  for (QubitId q : ops) avail_[q] = t_start + dur;
}

void Scheduler::finalize() {
  double end = 0.0;
  for (double f : finish_) end = std::max(end, f);
  for (const Relocation& r : out_.relocations) end = std::max(end, r.arrive_us);
  out_.makespan_us = end;

  for (std::size_t q = 0; q < where_.size(); ++q)
    out_.qubit_timeline[q].push_back({where_[q], dwell_start_[q], end});

  /* maintenance corrections for qubits dwelling in memory */
  double interval = tech_.idle_correction_interval_us();
  if (interval > 0.0) {
    for (std::size_t q = 0; q < out_.qubit_timeline.size(); ++q) {
      for (const Dwell& d : out_.qubit_timeline[q]) {
        if (d.region < 0 || !is_memory(d.region)) continue;
        int k = static_cast<int>(std::floor((d.to_us - d.from_us) / interval));
        for (int i = 1; i <= k; ++i) {
          double t = d.from_us + i * interval;
          out_.idle_corrections.push_back(
              {static_cast<QubitId>(q), d.region, t});
          out_.zero_demand[d.region].push_back(
              {t, double(tech_.costs.correction_zero_blocks)});
        }
      }
    }
  }

  auto by_time = [](const auto& a, const auto& b) {
    return a.time_us < b.time_us;
  };
  for (auto& v : out_.zero_demand) std::sort(v.begin(), v.end(), by_time);
  for (auto& v : out_.t_demand) std::sort(v.begin(), v.end(), by_time);
  for (auto& v : out_.router_load)
    std::sort(v.begin(), v.end(), [](const LoadEvent& a, const LoadEvent& b) {
      if (a.time_us != b.time_us) return a.time_us < b.time_us;
      return a.delta < b.delta;
    });
  std::sort(out_.relocations.begin(), out_.relocations.end(),
            [](const Relocation& a, const Relocation& b) {
              if (a.depart_us != b.depart_us) return a.depart_us < b.depart_us;
              return a.qubit < b.qubit;
            });
  std::sort(out_.idle_corrections.begin(), out_.idle_corrections.end(),
            [](const IdleCorrection& a, const IdleCorrection& b) {
              if (a.time_us != b.time_us) return a.time_us < b.time_us;
              return a.qubit < b.qubit;
            });
}

MappedSchedule Scheduler::run() {
  if (c_.hierarchical())
    throw std::invalid_argument("schedule requires a flat circuit");
  if (asg_.region_of.size() != c_.qubits.size())
    throw std::invalid_argument("assignment does not cover the circuit");

  dag_ = build_dag(c_);
  qalypso_ = lay_.config.kind == DatapathKind::Qalypso;
  has_memory_ = lay_.config.memory_regions > 0;
  teleport_us_ = tech_.costs.teleport_duration_us(tech_.errors);
  park_threshold_us_ = tech_.idle_relocate_multiple *
                       tech_.costs.average_gate_bundle_us(tech_.errors);
  {
    int s = lay_.intra_region_straights();
    intra_move_us_ = s * tech_.errors.move_straight.latency_us +
                     tech_.errors.move_turn.latency_us;
  }
  t_token_cost_ = tech_.t_factory_latency_mult;

  std::size_t ng = c_.gates.size();
  std::size_t nq = c_.qubits.size();
  out_.gates.assign(ng, {});
  out_.qubit_timeline.assign(nq, {});
  out_.zero_demand.assign(lay_.size(), {});
  out_.t_demand.assign(lay_.size(), {});
  out_.router_load.assign(lay_.size(), {});
  out_.cut_weight = asg_.cut_weight;

  crit_.assign(ng, 0.0);
  for (std::size_t i = ng; i-- > 0;) {
    double best = 0.0;
    for (GateId s : dag_.succs[i]) best = std::max(best, crit_[s]);
    double w = c_.gates[i].kind == GateKind::Correct ? 0.0 : 1.0;
    crit_[i] = w + best;
  }
  indeg_.assign(ng, 0);
  for (std::size_t i = 0; i < ng; ++i)
    indeg_[i] = static_cast<int>(dag_.preds[i].size());
  finish_.assign(ng, 0.0);

  occ_.assign(lay_.size(), {});
  where_ = asg_.region_of;
  avail_.assign(nq, 0.0);
  dwell_start_.assign(nq, 0.0);
  for (std::size_t q = 0; q < nq; ++q) claim(where_[q], 0.0);
  slot_free_.assign(lay_.size(), {});
  bucket_.assign(lay_.size(), {});
  AncillaFactory fac = AncillaFactory::make(lay_.config.factory);
  for (std::size_t r = 0; r < lay_.size(); ++r) {
    const Region& reg = lay_.regions[r];
    int slots = std::max(1, reg.capacity / 2);
    slot_free_[r].assign(static_cast<std::size_t>(slots), 0.0);
    bucket_[r].rate = reg.generators * fac.throughput_blocks_per_us;
    bucket_[r].cap =
        std::max(1.0, tech_.factory_buffer_depth * reg.generators);
    bucket_[r].tokens = bucket_[r].cap; /* warm start */
  }

  /* event-driven list scheduling: among ready gates take the one that can
   * start soonest, breaking ties by critical-path weight then id.  Keeping
   * dispatch close to simulated time stops early dispatches from booking
   * far-future residency that starves temporally earlier gates. */
  std::vector<GateId> ready;
  for (std::size_t i = 0; i < ng; ++i)
    if (indeg_[i] == 0) ready.push_back(static_cast<GateId>(i));

  auto est_of = [&](GateId g) {
    double est = 0.0;
    for (GateId p : dag_.preds[g]) est = std::max(est, finish_[p]);
    for (QubitId q : c_.gates[g].qubits()) est = std::max(est, avail_[q]);
    return est;
  };

  while (!ready.empty()) {
    std::size_t best = 0;
    double best_est = est_of(ready[0]);
    for (std::size_t i = 1; i < ready.size(); ++i) {
      double e = est_of(ready[i]);
      GateId a = ready[i], b = ready[best];
      bool take = e != best_est ? e < best_est
                  : crit_[a] != crit_[b] ? crit_[a] > crit_[b]
                                         : a < b;
      if (take) {
        best = i;
        best_est = e;
      }
    }
    GateId g = ready[best];
    ready[best] = ready.back();
    ready.pop_back();
    dispatch(c_.gates[g]);
    for (GateId s : dag_.succs[g])
      if (--indeg_[s] == 0) ready.push_back(s);
  }

  finalize();
  return std::move(out_);
}

}  // namespace

MappedSchedule schedule(const Circuit& c, const RegionLayout& layout,
                        const Assignment& asg, const NetworkSizing* provision) {
  if (provision && provision->provisioned.size() != layout.size())
    throw std::invalid_argument("network provision does not match layout");
  return Scheduler(c, layout, asg, provision).run();
}

RegionLayout size_ancilla(const MappedSchedule& s, const RegionLayout& layout) {
  if (layout.config.kind != DatapathKind::Qalypso)
    throw std::invalid_argument(
        "generator sizing applies to qalypso layouts only");
  AncillaFactory fac = AncillaFactory::make(layout.config.factory);
  double window = fac.latency_us;
  double per_gen = fac.throughput_blocks_per_us * window;

  RegionLayout sized = layout;
  for (std::size_t r = 0; r < layout.size(); ++r) {
    const auto& events = s.zero_demand[r];  /* sorted by time */
    double peak = 0.0, sum = 0.0;
    std::size_t j = 0;
    for (std::size_t i = 0; i < events.size(); ++i) {
      if (i > 0) sum -= events[i - 1].blocks;
      if (j < i) {
        j = i;
        sum = 0.0;
      }
      while (j < events.size() &&
             events[j].time_us < events[i].time_us + window)
        sum += events[j++].blocks;
      peak = std::max(peak, sum);
    }
    int gens = peak > 0.0 ? static_cast<int>(std::ceil(peak / per_gen)) : 0;
    sized.regions[r].generators = gens;
  }

  double widest = 1.0;
  for (std::size_t i = 0; i < sized.regions.size(); ++i)
    widest = std::max(widest, sized.region_area_mb(i));
  sized.cell_side_mb = static_cast<int>(std::ceil(std::sqrt(widest)));
  return sized;
}

NetworkSizing size_network(const MappedSchedule& s, const RegionLayout& layout,
                           double aggressiveness) {
  if (aggressiveness <= 0.0 || aggressiveness > 1.0)
    throw std::invalid_argument("network aggressiveness must be in (0, 1]");
  NetworkSizing ns;
  ns.aggressiveness = aggressiveness;
  ns.peak_load.assign(layout.size(), 0);
  ns.provisioned.assign(layout.size(), 0);
  for (std::size_t r = 0; r < layout.size(); ++r) {
    int run = 0, peak = 0;
    for (const LoadEvent& e : s.router_load[r]) {
      run += e.delta;
      peak = std::max(peak, run);
    }
    ns.peak_load[r] = peak;
    ns.provisioned[r] =
        peak == 0 ? 0
                  : std::max(1, static_cast<int>(
                                    std::ceil(peak * aggressiveness)));
  }
  return ns;
}

double NetworkSizing::extra_router_area_mb(const RegionLayout& lay) const {
  double area = 0.0;
  for (std::size_t r = 0; r < provisioned.size(); ++r)
    area += provisioned[r] * lay.tech.router.area_per_load_mb;
  return area;
}

std::vector<std::string> validate_schedule(const MappedSchedule& s,
                                           const Circuit& c,
                                           const RegionLayout& layout) {
  std::vector<std::string> bad;
  auto complain = [&](std::string msg) {
    if (bad.size() < 32) bad.push_back(std::move(msg));
  };
  const double eps = 1e-6;

  /* occupancy from dwell intervals */
  for (std::size_t r = 0; r < layout.size(); ++r) {
    std::vector<std::pair<double, int>> ev;
    for (const auto& tl : s.qubit_timeline)
      for (const Dwell& d : tl)
        if (d.region == static_cast<int>(r)) {
          ev.emplace_back(d.from_us, +1);
          ev.emplace_back(d.to_us, -1);
        }
    std::sort(ev.begin(), ev.end(), [](const auto& a, const auto& b) {
      if (a.first != b.first) return a.first < b.first;
      return a.second < b.second;
    });
    int run = 0;
    for (const auto& [t, d] : ev) {
      run += d;
      if (run > layout.regions[r].capacity)
        complain("region " + std::to_string(r) + " holds " +
                 std::to_string(run) + " qubits at t=" + std::to_string(t));
    }
  }

  /* co-location and region eligibility per gate */
  auto located = [&](QubitId q, double from, double to, int region) {
    for (const Dwell& d : s.qubit_timeline[q])
      if (d.region == region && d.from_us <= from + eps && d.to_us >= to - eps)
        return true;
    return false;
  };
  for (const Gate& g : c.gates) {
    const GatePlacement& p = s.gates[g.id];
    if (p.region < 0 || p.region >= static_cast<int>(layout.size())) {
      complain("gate " + std::to_string(g.id) + " has no region");
      continue;
    }
    const Region& reg = layout.regions[p.region];
    if (g.kind != GateKind::Correct && reg.type != RegionType::Data)
      complain("gate " + std::to_string(g.id) + " runs in a memory region");
    if (layout.config.policy == TGatePolicy::DesignatedSites &&
        (g.kind == GateKind::T || g.kind == GateKind::Toffoli) && !reg.t_site)
      complain("gate " + std::to_string(g.id) +
               " runs T work off the designated sites");
    for (QubitId q : g.qubits())
      if (!located(q, p.start_us, p.start_us + p.duration_us, p.region))
        complain("gate " + std::to_string(g.id) + ": qubit " +
                 std::to_string(q) + " is not resident for its duration");
  }

  /* dependency order */
  Dag dag = build_dag(c);
  for (const Gate& g : c.gates)
    for (GateId pr : dag.preds[g.id]) {
      double pf = s.gates[pr].start_us + s.gates[pr].duration_us;
      if (pf > s.gates[g.id].start_us + eps)
        complain("gate " + std::to_string(g.id) + " starts before gate " +
                 std::to_string(pr) + " finishes");
    }

  if (layout.config.memory_regions == 0) {
    if (!s.idle_corrections.empty())
      complain("memoryless layout has idle corrections");
    for (const Relocation& r : s.relocations)
      if (layout.regions[r.to].type == RegionType::Memory ||
          layout.regions[r.from].type == RegionType::Memory)
        complain("memoryless layout has memory relocations");
  }
  if (layout.config.kind == DatapathKind::Qalypso &&
      s.ancilla_stall_us > 0.0)
    complain("qalypso schedule reports ancilla stalls");
  return bad;
}

}  // namespace qcad
