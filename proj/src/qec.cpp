#include "qcad/qec.hpp"

#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>

namespace qcad {

void EDistConfig::validate() const {
  if (threshold < 0 || base < 0 || fresh < 0)
    throw std::invalid_argument("edist config fields must be non-negative");
  if (base >= threshold)
    throw std::invalid_argument(
        "correction base " + std::to_string(base) +
        " must be below the threshold " + std::to_string(threshold));
  if (fresh > threshold)
    throw std::invalid_argument(
        "fresh-qubit count " + std::to_string(fresh) +
        " must not exceed the threshold " + std::to_string(threshold));
}

void CorrectionPlacement::add(GateId after_gate, QubitId qubit) {
  CorrectionPoint pt{after_gate, qubit};
  auto it = std::lower_bound(points.begin(), points.end(), pt);
  if (it == points.end() || *it != pt) points.insert(it, pt);
}

bool CorrectionPlacement::contains(GateId after_gate, QubitId qubit) const {
  return std::binary_search(points.begin(), points.end(),
                            CorrectionPoint{after_gate, qubit});
}

namespace {

void require_flat_plain(const Circuit& c, const char* who) {
  if (c.hierarchical())
    throw std::invalid_argument(std::string(who) + " requires a flat circuit");
  for (const Gate& g : c.gates)
    if (g.kind == GateKind::Correct)
      throw std::invalid_argument(std::string(who) +
                                  ": circuit already contains correct gates");
}

bool gate_has_operand(const Gate& g, QubitId q) {
  for (QubitId op : g.qubits())
    if (op == q) return true;
  return false;
}

void check_points(const Circuit& c, const CorrectionPlacement& p) {
  for (const CorrectionPoint& pt : p.points) {
    if (pt.after_gate < 0 ||
        static_cast<std::size_t>(pt.after_gate) >= c.gates.size())
      throw std::invalid_argument("correction point references gate " +
                                  std::to_string(pt.after_gate) +
                                  " which does not exist");
    if (!gate_has_operand(c.gates[pt.after_gate], pt.qubit))
      throw std::invalid_argument(
          "correction point on qubit " + std::to_string(pt.qubit) +
          " which gate " + std::to_string(pt.after_gate) + " does not touch");
  }
}

}  // namespace

EDistResult compute_edist(const Circuit& c, const CorrectionPlacement& p,
                          const EDistConfig& cfg) {
  cfg.validate();
  require_flat_plain(c, "compute_edist");
  check_points(c, p);

  std::vector<int> count(c.qubits.size(), cfg.fresh);
  EDistResult r;
  r.post_gate.assign(c.gates.size(), 0);
  std::size_t next_pt = 0;  /* points are sorted by (gate, qubit) */
  for (std::size_t i = 0; i < c.gates.size(); ++i) {
    const Gate& g = c.gates[i];
    int worst = 0;
    for (QubitId q : g.qubits()) worst = std::max(worst, count[q]);
    int post = worst + 1;
    for (QubitId q : g.qubits()) count[q] = post;
    r.post_gate[i] = post;
    r.max_edist = std::max(r.max_edist, post);
    while (next_pt < p.points.size() &&
           p.points[next_pt].after_gate == g.id) {
      count[p.points[next_pt].qubit] = cfg.base;
      ++next_pt;
    }
  }
  return r;
}

namespace {

CorrectionPlacement greedy_insert(const Circuit& c, const EDistConfig& cfg) {
  std::vector<int> count(c.qubits.size(), cfg.fresh);
  std::vector<GateId> prev(c.qubits.size(), -1);
  CorrectionPlacement out;
  for (const Gate& g : c.gates) {
    auto ops = g.qubits();
    auto post = [&] {
      int worst = 0;
      for (QubitId q : ops) worst = std::max(worst, count[q]);
      return worst + 1;
    };
    if (post() > cfg.threshold) {
      /* correct the hottest operands first, ties to the lowest qubit id */
      std::array<QubitId, 3> order{};
      std::copy(ops.begin(), ops.end(), order.begin());
      std::sort(order.begin(), order.begin() + ops.size(),
                [&](QubitId a, QubitId b) {
                  if (count[a] != count[b]) return count[a] > count[b];
                  return a < b;
                });
      for (std::size_t i = 0; i < ops.size() && post() > cfg.threshold; ++i) {
        QubitId q = order[i];
        if (prev[q] < 0 || count[q] <= cfg.base) continue;
        out.add(prev[q], q);
        count[q] = cfg.base;
      }
      if (post() > cfg.threshold)
        throw std::runtime_error(
            "no feasible correction placement: gate " + std::to_string(g.id) +
            " still exceeds threshold " + std::to_string(cfg.threshold) +
            " with every operand corrected");
    }
    int p = post();
    for (QubitId q : ops) {
      count[q] = p;
      prev[q] = g.id;
    }
  }
  return out;
}

/*
 * Exact minimum placement by forward dynamic programming.  Any placement can
 * be normalized so each correction sits immediately before some gate on one
 * of its operands (delaying a correction toward the qubit's next gate never
 * raises any count), so it is enough to decide, per gate and operand,
 * whether to correct just before that gate.  States are the count vectors
 * over active qubits; with <= 10 gates and small base/fresh every count
 * fits in 6 bits.
 */
struct ExactInserter {
  static constexpr int kMaxGates = 10;
  static constexpr int kMaxQubits = 9;
  static constexpr int kMaxResetValue = 32;
  static constexpr int kInf = std::numeric_limits<int>::max() / 2;

  const Circuit& c;
  EDistConfig cfg;
  std::vector<int> dense;                    /* qubit id -> dense index */
  std::vector<std::array<GateId, 3>> prev;   /* per gate, per slot */
  /* key -> (best cost, chosen correction mask) */
  std::unordered_map<std::uint64_t, std::pair<int, unsigned>> memo;

  ExactInserter(const Circuit& circuit, const EDistConfig& config)
      : c(circuit), cfg(config) {}

  static bool applicable(const Circuit& c, const EDistConfig& cfg) {
    if (c.gates.size() > kMaxGates) return false;
    if (cfg.base > kMaxResetValue || cfg.fresh > kMaxResetValue) return false;
    std::vector<bool> seen(c.qubits.size(), false);
    std::size_t active = 0;
    for (const Gate& g : c.gates)
      for (QubitId q : g.qubits())
        if (!seen[q]) {
          seen[q] = true;
          ++active;
        }
    return active <= kMaxQubits;
  }

  std::uint64_t key(std::size_t idx, const std::vector<int>& count) const {
    std::uint64_t k = 0;
    for (int v : count) k = (k << 6) | static_cast<std::uint64_t>(v);
    return (k << 4) | idx;
  }

  int solve(std::size_t idx, std::vector<int>& count) {
    if (idx == c.gates.size()) return 0;
    std::uint64_t k = key(idx, count);
    if (auto it = memo.find(k); it != memo.end()) return it->second.first;

    const Gate& g = c.gates[idx];
    auto ops = g.qubits();
    int best = kInf;
    unsigned best_mask = 0;
    unsigned nmask = 1u << ops.size();
    /* masks ordered by popcount so ties keep corrections latest/fewest */
    std::array<unsigned, 8> masks{};
    for (unsigned m = 0; m < nmask; ++m) masks[m] = m;
    std::sort(masks.begin(), masks.begin() + nmask,
              [](unsigned a, unsigned b) {
                int pa = __builtin_popcount(a), pb = __builtin_popcount(b);
                return pa != pb ? pa < pb : a < b;
              });
    for (unsigned mi = 0; mi < nmask; ++mi) {
      unsigned mask = masks[mi];
      bool ok = true;
      int worst = 0;
      for (std::size_t s = 0; s < ops.size(); ++s) {
        int d = dense[ops[s]];
        if (mask & (1u << s)) {
          /* correcting needs a prior gate and must actually lower the count */
          if (prev[idx][s] < 0 || count[d] <= cfg.base) {
            ok = false;
            break;
          }
          worst = std::max(worst, cfg.base);
        } else {
          worst = std::max(worst, count[d]);
        }
      }
      if (!ok || worst + 1 > cfg.threshold) continue;
      std::array<int, 3> saved{};
      for (std::size_t s = 0; s < ops.size(); ++s) {
        saved[s] = count[dense[ops[s]]];
        count[dense[ops[s]]] = worst + 1;
      }
      int sub = solve(idx + 1, count);
      for (std::size_t s = ops.size(); s-- > 0;)
        count[dense[ops[s]]] = saved[s];
      if (sub < kInf) {
        int total = __builtin_popcount(mask) + sub;
        if (total < best) {
          best = total;
          best_mask = mask;
        }
      }
    }
    memo.emplace(k, std::make_pair(best, best_mask));
    return best;
  }

  CorrectionPlacement run() {
    dense.assign(c.qubits.size(), -1);
    int next = 0;
    std::vector<GateId> last(c.qubits.size(), -1);
    prev.resize(c.gates.size());
    for (std::size_t i = 0; i < c.gates.size(); ++i) {
      auto ops = c.gates[i].qubits();
      for (std::size_t s = 0; s < ops.size(); ++s) {
        if (dense[ops[s]] < 0) dense[ops[s]] = next++;
        prev[i][s] = last[ops[s]];
      }
      for (QubitId q : ops) last[q] = c.gates[i].id;
    }

    std::vector<int> count(static_cast<std::size_t>(next), cfg.fresh);
    if (solve(0, count) >= kInf)
      throw std::runtime_error(
          "no feasible correction placement under threshold " +
          std::to_string(cfg.threshold));

    /* replay the memoized choices to materialize the points */
    CorrectionPlacement out;
    std::fill(count.begin(), count.end(), cfg.fresh);
    for (std::size_t idx = 0; idx < c.gates.size(); ++idx) {
      unsigned mask = memo.at(key(idx, count)).second;
      auto ops = c.gates[idx].qubits();
      int worst = 0;
      for (std::size_t s = 0; s < ops.size(); ++s) {
        if (mask & (1u << s)) {
          out.add(prev[idx][s], ops[s]);
          count[dense[ops[s]]] = cfg.base;
        }
        worst = std::max(worst, count[dense[ops[s]]]);
      }
      for (QubitId q : ops) count[dense[q]] = worst + 1;
    }
    return out;
  }
};

}  // namespace

CorrectionPlacement insert_corrections(const Circuit& c,
                                       const EDistConfig& cfg) {
  cfg.validate();
  require_flat_plain(c, "insert_corrections");
  if (ExactInserter::applicable(c, cfg))
    return ExactInserter(c, cfg).run();
  return greedy_insert(c, cfg);
}

CorrectionPlacement every_gate_placement(const Circuit& c) {
  require_flat_plain(c, "every_gate_placement");
  CorrectionPlacement out;
  for (const Gate& g : c.gates)
    for (QubitId q : g.qubits()) out.add(g.id, q);
  return out;
}

std::size_t min_corrections_oracle(const Circuit& c, const EDistConfig& cfg) {
  cfg.validate();
  require_flat_plain(c, "min_corrections_oracle");
  std::vector<bool> seen(c.qubits.size(), false);
  std::size_t active = 0;
  for (const Gate& g : c.gates)
    for (QubitId q : g.qubits())
      if (!seen[q]) {
        seen[q] = true;
        ++active;
      }
  if (c.gates.size() > 8 || active > 6)
    throw std::invalid_argument("instance too large for exhaustive search");

  std::vector<CorrectionPoint> candidates;
  for (const Gate& g : c.gates)
    for (QubitId q : g.qubits()) candidates.push_back({g.id, q});

  auto feasible = [&](const std::vector<std::size_t>& pick) {
    CorrectionPlacement p;
    for (std::size_t i : pick)
      p.add(candidates[i].after_gate, candidates[i].qubit);
    return compute_edist(c, p, cfg).max_edist <= cfg.threshold;
  };

  std::size_t n = candidates.size();
  for (std::size_t k = 0; k <= n; ++k) {
    /* all k-subsets in lexicographic order */
    std::vector<std::size_t> pick(k);
    for (std::size_t i = 0; i < k; ++i) pick[i] = i;
    while (true) {
      if (feasible(pick)) return k;
      if (k == 0 || pick[0] == n - k) break;  /* past the last combination */
      std::size_t j = k;
      while (j-- > 0)
        if (pick[j] != j + n - k) break;
      ++pick[j];
      for (std::size_t t = j + 1; t < k; ++t) pick[t] = pick[t - 1] + 1;
    }
  }
  throw std::runtime_error("no feasible correction placement under threshold " +
                           std::to_string(cfg.threshold));
}

Circuit apply_placement(const Circuit& c, const CorrectionPlacement& p) {
  require_flat_plain(c, "apply_placement");
  check_points(c, p);
  Circuit out;
  out.qubits = c.qubits;
  std::size_t next_pt = 0;
  for (const Gate& g : c.gates) {
    Gate copy = g;
    copy.id = static_cast<GateId>(out.gates.size());
    out.gates.push_back(copy);
    while (next_pt < p.points.size() && p.points[next_pt].after_gate == g.id) {
      out.add_gate(GateKind::Correct, {p.points[next_pt].qubit}, false, g.tag);
      ++next_pt;
    }
  }
  out.validate();
  return out;
}

namespace {

struct Candidate {
  CorrectionPlacement placement;
  double p = -1.0;
};

}  // namespace

TuneResult tune_threshold(const Circuit& c, TuneMode mode,
                          const SuccessEval& eval, const EDistConfig& base_cfg,
                          std::size_t budget) {
  require_flat_plain(c, "tune_threshold");
  int depth = std::max(1, static_cast<int>(c.depth()) + base_cfg.fresh);
  int lo_t = std::max({1, base_cfg.base + 1, base_cfg.fresh});

  std::map<int, std::optional<Candidate>> cache;
  auto candidate = [&](int t) -> std::optional<Candidate>& {
    auto [it, fresh_entry] = cache.try_emplace(t);
    if (fresh_entry) {
      EDistConfig cfg = base_cfg;
      cfg.threshold = t;
      try {
        it->second = Candidate{insert_corrections(c, cfg), -1.0};
      } catch (const std::runtime_error&) {
        it->second = std::nullopt;
      }
    }
    return it->second;
  };
  auto success = [&](int t) -> double {
    auto& cand = candidate(t);
    if (!cand) return -1.0;
    if (cand->p < 0.0) cand->p = eval(c, cand->placement);
    return cand->p;
  };
  auto fallback = [&](double p_eg) {
    TuneResult r;
    r.placement = every_gate_placement(c);
    r.p_success = p_eg >= 0.0 ? p_eg : eval(c, r.placement);
    r.p_every_gate = r.p_success;
    r.fell_back_to_every_gate = true;
    return r;
  };

  if (lo_t > depth) return fallback(-1.0);

  TuneResult r;
  switch (mode) {
    case TuneMode::MaxSuccess: {
      /* ladder of candidate thresholds, then refine around the best */
      std::vector<int> ladder;
      if (depth - lo_t <= 16) {
        for (int t = lo_t; t <= depth; ++t) ladder.push_back(t);
      } else {
        for (int t = lo_t; t < depth; t = std::max(t + 1, t * 2))
          ladder.push_back(t);
        ladder.push_back(depth);
      }
      int best_t = -1;
      double best_p = -1.0;
      for (int t : ladder) {
        double p = success(t);
        if (p >= best_p && p >= 0.0) {  /* ties go to the larger threshold */
          best_p = p;
          best_t = t;
        }
      }
      if (best_t < 0) return fallback(-1.0);
      if (depth - lo_t > 16) {
        /* binary refinement between the ladder neighbours of the best */
        auto it = std::find(ladder.begin(), ladder.end(), best_t);
        int lo = it == ladder.begin() ? best_t : *(it - 1);
        int hi = (it + 1) == ladder.end() ? best_t : *(it + 1);
        while (hi - lo > 1) {
          int mid = lo + (hi - lo) / 2;
          double p = success(mid);
          if (p >= best_p) {
            best_p = p;
            best_t = mid;
            lo = mid;
          } else {
            hi = mid;
          }
        }
      }
      r.threshold = best_t;
      r.placement = candidate(best_t)->placement;
      r.p_success = success(best_t);
      break;
    }
    case TuneMode::MaxTWithin5Pct: {
      double p_eg = eval(c, every_gate_placement(c));
      auto good = [&](int t) {
        double p = success(t);
        return p >= 0.0 && p >= 0.95 * p_eg;
      };
      if (!good(lo_t)) return fallback(p_eg);
      int lo = lo_t, hi = depth;
      while (lo < hi) {  /* largest t with good(t), success non-increasing */
        int mid = lo + (hi - lo + 1) / 2;
        if (good(mid))
          lo = mid;
        else
          hi = mid - 1;
      }
      r.threshold = lo;
      r.placement = candidate(lo)->placement;
      r.p_success = success(lo);
      r.p_every_gate = p_eg;
      break;
    }
    case TuneMode::Budget: {
      auto fits = [&](int t) {
        auto& cand = candidate(t);
        return cand && cand->placement.size() <= budget;
      };
      if (!fits(depth)) return fallback(-1.0);
      int lo = lo_t, hi = depth;
      while (lo < hi) {  /* smallest t within budget: size non-increasing */
        int mid = lo + (hi - lo) / 2;
        if (fits(mid))
          hi = mid;
        else
          lo = mid + 1;
      }
      r.threshold = lo;
      r.placement = candidate(lo)->placement;
      r.p_success = success(lo);
      break;
    }
  }
  return r;
}

}  // namespace qcad
