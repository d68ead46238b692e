#include "bincp/bincounts.hpp"

#include <algorithm>
#include <cassert>
#include <cstdint>
#include <set>
#include <stdexcept>

#include "bincp/constraints.hpp"

namespace bincp {

std::optional<std::vector<int>> bin_count(std::span<const int> values, const BinSpec& bins,
                                          BinMode mode) {
  std::vector<int> counts(bins.num_bins(), 0);
  for (int v : values) {
    std::optional<int> j = bins.bin_of(v);
    if (j)
      ++counts[*j];
    else if (mode == BinMode::kStrict)
      return std::nullopt;
  }
  return counts;
}

bool check_bin_counts(std::span<const int> values, std::span<const int> counts,
                      const BinSpec& bins, BinMode mode) {
  if ((int)counts.size() != bins.num_bins()) return false;
  auto actual = bin_count(values, bins, mode);
  if (!actual) return false;
  return std::equal(actual->begin(), actual->end(), counts.begin());
}

std::vector<VarId> post_bin_counts_decomposition(Solver& s, const BinCountsVars& v) {
  if ((int)v.counts.size() != v.bins.num_bins())
    throw std::invalid_argument("bin_counts: one count variable per bin expected");
  const int n = (int)v.xs.size();
  // Occurrence variables only for in-range values that actually occur in
  // some domain; absent values have occurrence zero and need no variable.
  std::set<int> vals;
  for (VarId x : v.xs)
    s.dom(x).for_each([&](int val) {
      if (v.bins.bin_of(val)) vals.insert(val);
    });
  std::vector<int> value_list(vals.begin(), vals.end());
  std::vector<VarId> occ;
  for (int val : value_list)
    occ.push_back(s.new_var(IntervalSet::interval(0, n), "occ_" + std::to_string(val)));
  if (!value_list.empty()) post_gcc(s, v.xs, value_list, occ);

  for (int j = 0; j < v.bins.num_bins(); ++j) {
    std::vector<LinTerm> terms;
    for (size_t k = 0; k < value_list.size(); ++k)
      if (v.bins.bin_of(value_list[k]) == j) terms.push_back({1, occ[k]});
    terms.push_back({-1, v.counts[j]});
    post_linear(s, std::move(terms), LinRel::kEq, 0);
  }
  std::vector<LinTerm> total;
  for (VarId c : v.counts) total.push_back({1, c});
  post_linear(s, std::move(total), v.mode == BinMode::kStrict ? LinRel::kEq : LinRel::kLe, n);
  return occ;
}

namespace {

// Exact filter.  Each pass:
//   1. strict mode drops values no bin covers,
//   2. a feasible flow bounds every count variable,
//   3. arc flow ranges prune whole bin intervals from the variables.
// A forced arc empties every other bin's interval; a dead arc empties
// its own.  Reductions are sound w.r.t. the unchanged solution set, so
// applying them batched from one snapshot is safe; the queue re-runs the
// filter until nothing moves.
class BinCountsGac : public Propagator {
 public:
  BinCountsGac(BinCountsVars v, bool incremental)
      : v_(std::move(v)), incremental_(incremental) {}

  void attach(Solver& s) override {
    for (VarId x : v_.xs) s.subscribe(x, this, kOnChange);
    for (VarId c : v_.counts) s.subscribe(c, this, kOnBounds);
    if (incremental_) {
      const int slots = v_.bins.num_bins() + 1;  // trailing slot: out of range
      for (VarId x : v_.xs) {
        (void)x;
        for (int j = 0; j < slots; ++j) g_.push_back(s.new_stored_bool(true));
      }
    }
  }

  bool propagate(Solver& s, VarId trigger) override {
    const int n = (int)v_.xs.size();
    const int m = v_.bins.num_bins();
    const bool hidden = v_.mode == BinMode::kHiddenBin;

    if (!hidden) {
      for (VarId x : v_.xs) {
        if (!s.remove_range(x, INT32_MIN / 2, v_.bins.bounds.front() - 1)) return false;
        if (!s.remove_range(x, v_.bins.bounds.back(), INT32_MAX / 2)) return false;
      }
    }

    // Count bounds from the network.
    {
      BinGraph g = graph(s);
      FlowAnalysis fa = analyze(g, /*want_arcs=*/false);
      if (!fa.ok) return false;
      for (int j = 0; j < m; ++j) {
        if (!s.set_min(v_.counts[j], fa.count_range[j].first)) return false;
        if (!s.set_max(v_.counts[j], fa.count_range[j].second)) return false;
      }
    }

    // Arc bounds from the network under the tightened counts.
    BinGraph g = graph(s);
    FlowAnalysis fa = analyze(g, /*want_arcs=*/true);
    if (!fa.ok) return false;

    // With a single-variable trigger and warm state, an arc (i,j) can only
    // have moved if the trigger shares bin j with variable i.
    const int slots = m + 1;
    int ti = -1;
    std::vector<char> trig_bins;
    if (incremental_ && state_ready_ && trigger != kNoVar) {
      for (int i = 0; i < n; ++i)
        if (v_.xs[i] == trigger) ti = i;
      if (ti >= 0) {
        trig_bins.resize(slots);
        for (int j = 0; j < slots; ++j) trig_bins[j] = s.bool_value(g_[ti * slots + j]);
      }
    }

    struct Prune {
      int var;
      int lo, hi;  // closed value range to erase
      int bin;     // slot whose interval dies (for the stored booleans)
    };
    std::vector<Prune> prunes;
    for (int i = 0; i < n; ++i) {
      for (size_t a = 0; a < g.allowed[i].size(); ++a) {
        int j = g.allowed[i][a];
        if (ti >= 0 && !(trig_bins[j] && s.bool_value(g_[i * slots + j]))) continue;
        auto [flo, fhi] = fa.arc_range[i][a];
        if (fhi == 0) {
          // Arc dead in every solution: drop this slot's values.
          auto [lo, hi] = slot_range(j);
          prunes.push_back({i, lo, hi, j});
        } else if (flo == 1) {
          // Arc forced: every other slot's values die.
          for (int l = 0; l < slots; ++l) {
            if (l == j) continue;
            if (l == m && !hidden) continue;
            auto [lo, hi] = slot_range(l);
            prunes.push_back({i, lo, hi, l});
          }
        }
      }
    }
    for (const Prune& p : prunes) {
      if (p.bin == m) {
        // Out-of-range region: two unbounded sides.
        if (!s.remove_range(v_.xs[p.var], INT32_MIN / 2, v_.bins.bounds.front() - 1)) return false;
        if (!s.remove_range(v_.xs[p.var], v_.bins.bounds.back(), INT32_MAX / 2)) return false;
      } else {
        if (!s.remove_range(v_.xs[p.var], p.lo, p.hi)) return false;
      }
      if (incremental_) s.set_bool(g_[p.var * slots + p.bin], false);
    }

    if (incremental_ && !state_ready_) {
      // First full pass done: record which intervals are present.
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < m; ++j) {
          bool present = !v_.bins.slice(s.dom(v_.xs[i]), j).empty();
          s.set_bool(g_[i * slots + j], present);
        }
        IntervalSet out = s.dom(v_.xs[i]);
        out.erase_range(v_.bins.bounds.front(), v_.bins.bounds.back() - 1);
        s.set_bool(g_[i * slots + m], !out.empty());
      }
      state_ready_ = true;
    }
    return true;
  }

 private:
  BinGraph graph(Solver& s) const {
    std::vector<IntervalSet> doms;
    for (VarId x : v_.xs) doms.push_back(s.dom(x));
    std::vector<std::pair<int, int>> cb;
    for (VarId c : v_.counts) cb.emplace_back(s.min(c), s.max(c));
    return build_graph(doms, v_.bins, cb, v_.mode == BinMode::kHiddenBin);
  }

  // Closed value range of slot j; the out-of-range slot has no single
  // range and is handled by its own branch when pruning.
  std::pair<int, int> slot_range(int j) const {
    if (j == v_.bins.num_bins()) return {0, -1};
    return {v_.bins.bounds[j], v_.bins.bounds[j + 1] - 1};
  }

  BinCountsVars v_;
  bool incremental_;
  bool state_ready_ = false;
  std::vector<BoolId> g_;  // (var,slot) -> "interval still present", trailed
};

}  // namespace

void post_bin_counts_gac(Solver& s, const BinCountsVars& v) {
  if ((int)v.counts.size() != v.bins.num_bins())
    throw std::invalid_argument("bin_counts: one count variable per bin expected");
  s.post(std::make_unique<BinCountsGac>(v, false));
}

void post_bin_counts_gac_incremental(Solver& s, const BinCountsVars& v) {
  if ((int)v.counts.size() != v.bins.num_bins())
    throw std::invalid_argument("bin_counts: one count variable per bin expected");
  s.post(std::make_unique<BinCountsGac>(v, true));
}

}  // namespace bincp
