#include "bincp/flow.hpp"

#include <algorithm>
#include <cassert>
#include <deque>
#include <stdexcept>

namespace bincp {

BinSpec BinSpec::make(std::vector<int> bounds) {
  if (bounds.size() < 2) throw std::invalid_argument("bins: need at least two boundaries");
  for (size_t i = 1; i < bounds.size(); ++i)
    if (bounds[i] <= bounds[i - 1])
      throw std::invalid_argument("bins: boundaries must be strictly increasing");
  return BinSpec{std::move(bounds)};
}

std::optional<int> BinSpec::bin_of(int v) const {
  if (v < bounds.front() || v >= bounds.back()) return std::nullopt;
  auto it = std::upper_bound(bounds.begin(), bounds.end(), v);
  return (int)(it - bounds.begin()) - 1;
}

bool BinGraph::has_arc(int i, int j) const {
  return std::find(allowed[i].begin(), allowed[i].end(), j) != allowed[i].end();
}

bool BinGraph::stranded_var() const {
  for (char c : no_arc)
    if (c) return true;
  return false;
}

BinGraph build_graph(std::span<const IntervalSet> domains, const BinSpec& bins,
                     std::span<const std::pair<int, int>> count_bounds, bool hidden_bin) {
  const int m = bins.num_bins();
  if ((int)count_bounds.size() != m)
    throw std::invalid_argument("build_graph: one count bound per bin expected");
  BinGraph g;
  g.n = (int)domains.size();
  g.bins = bins;
  g.hidden = hidden_bin;
  g.allowed.resize(g.n);
  g.labels.resize(g.n);
  g.no_arc.assign(g.n, 0);
  for (int i = 0; i < g.n; ++i) {
    const IntervalSet& d = domains[i];
    for (int j = 0; j < m; ++j) {
      IntervalSet lab = bins.slice(d, j);
      if (!lab.empty()) {
        g.allowed[i].push_back(j);
        g.labels[i].push_back(std::move(lab));
      }
    }
    if (hidden_bin) {
      IntervalSet out = d;
      out.erase_range(bins.bounds.front(), bins.bounds.back() - 1);
      if (!out.empty()) {
        g.allowed[i].push_back(m);
        g.labels[i].push_back(std::move(out));
      }
    }
    if (g.allowed[i].empty()) g.no_arc[i] = 1;
  }
  for (auto [lo, hi] : count_bounds) {
    g.count_lo.push_back(lo);
    g.count_hi.push_back(hi);
  }
  if (hidden_bin) {
    g.count_lo.push_back(0);
    g.count_hi.push_back(g.n);
  }
  return g;
}

namespace {

// Residual moves on a flow: a variable assigned to bin u may hop to any
// other allowed bin v. Chains of hops form the augmenting structure.
struct Residual {
  const BinGraph& g;
  BinFlow& f;
  // by_bin[j] = vars currently assigned to j
  std::vector<std::vector<int>> by_bin;

  Residual(const BinGraph& g_, BinFlow& f_) : g(g_), f(f_) { rebuild(); }

  void rebuild() {
    by_bin.assign(g.slots(), {});
    for (int i = 0; i < g.n; ++i)
      if (f.assign[i] >= 0) by_bin[f.assign[i]].push_back(i);
  }

  void move(int var, int to) {
    int from = f.assign[var];
    auto& v = by_bin[from];
    v.erase(std::find(v.begin(), v.end(), var));
    f.assign[var] = to;
    f.cnt[from]--;
    f.cnt[to]++;
    by_bin[to].push_back(var);
  }

  // BFS over bins via single-variable hops.  Returns parent edges
  // (prev bin, var moved) or empty if target unreachable.  `start_ok`
  // selects source bins, `target` stops the search.
  bool find_chain(const std::vector<int>& sources, int target,
                  std::vector<std::pair<int, int>>& parent) {
    const int S = g.slots();
    parent.assign(S, {-1, -1});
    std::deque<int> q;
    std::vector<char> seen(S, 0);
    for (int s : sources) {
      if (s == target) continue;  // a null chain is useless
      if (!seen[s]) {
        seen[s] = 1;
        parent[s] = {-2, -1};
        q.push_back(s);
      }
    }
    while (!q.empty()) {
      int u = q.front();
      q.pop_front();
      for (int var : by_bin[u]) {
        for (int v : g.allowed[var]) {
          if (v == u || seen[v]) continue;
          seen[v] = 1;
          parent[v] = {u, var};
          if (v == target) return true;
          q.push_back(v);
        }
      }
    }
    return false;
  }

  // Move one unit along the chain ending at `target`.
  void apply_chain(int target, const std::vector<std::pair<int, int>>& parent) {
    int v = target;
    while (parent[v].first >= 0) {
      auto [u, var] = parent[v];
      move(var, v);
      v = u;
    }
  }
};

// Greedy placement plus repair.  Returns nullopt on infeasibility.
std::optional<BinFlow> find_feasible(const BinGraph& g,
                                     const std::vector<std::vector<int>>& allowed) {
  BinFlow f;
  f.assign.assign(g.n, -1);
  f.cnt.assign(g.slots(), 0);
  for (int i = 0; i < g.n; ++i) {
    if (allowed[i].empty()) return std::nullopt;
    int pick = allowed[i][0];
    for (int j : allowed[i])
      if (f.cnt[j] < g.count_hi[j]) {
        pick = j;
        break;
      }
    f.assign[i] = pick;
    f.cnt[pick]++;
  }
  BinGraph g2 = g;  // residual uses possibly restricted arcs
  g2.allowed = allowed;
  Residual r(g2, f);
  std::vector<std::pair<int, int>> parent;
  // Drain overfull bins: chain from the overfull bin to any bin with room.
  for (int j = 0; j < g.slots(); ++j) {
    while (f.cnt[j] > g.count_hi[j]) {
      bool found = false;
      for (int k = 0; k < g.slots() && !found; ++k) {
        if (f.cnt[k] >= g.count_hi[k]) continue;
        if (r.find_chain({j}, k, parent)) {
          r.apply_chain(k, parent);
          found = true;
        }
      }
      if (!found) return std::nullopt;
    }
  }
  // Fill deficits: chain from any bin with spare units into the deficit bin.
  for (int j = 0; j < g.slots(); ++j) {
    while (f.cnt[j] < g.count_lo[j]) {
      std::vector<int> sources;
      for (int k = 0; k < g.slots(); ++k)
        if (k != j && f.cnt[k] > g.count_lo[k]) sources.push_back(k);
      if (!r.find_chain(sources, j, parent)) return std::nullopt;
      r.apply_chain(j, parent);
    }
  }
  return f;
}

// Node ids for arc reachability: vars [0,n), slots [n,n+S), t = n+S.
struct Reach {
  const BinGraph& g;
  const BinFlow& f;
  int n, S, t;

  Reach(const BinGraph& g_, const BinFlow& f_)
      : g(g_), f(f_), n(g_.n), S(g_.slots()), t(n + S) {}

  // BFS over the residual digraph from `start` (node id).
  std::vector<char> reach(int start) const {
    std::vector<char> seen(t + 1, 0);
    std::deque<int> q{start};
    seen[start] = 1;
    // Per-slot var lists to expand bin nodes fast.
    std::vector<std::vector<int>> by_bin(S);
    for (int i = 0; i < n; ++i) by_bin[f.assign[i]].push_back(i);
    while (!q.empty()) {
      int u = q.front();
      q.pop_front();
      auto visit = [&](int w) {
        if (!seen[w]) {
          seen[w] = 1;
          q.push_back(w);
        }
      };
      if (u < n) {
        for (int j : g.allowed[u])
          if (j != f.assign[u]) visit(n + j);
      } else if (u < t) {
        int j = u - n;
        for (int i : by_bin[j]) visit(i);
        if (f.cnt[j] < g.count_hi[j]) visit(t);
      } else {
        for (int j = 0; j < S; ++j)
          if (f.cnt[j] > g.count_lo[j]) visit(n + j);
      }
    }
    return seen;
  }
};

// Push cnt[j] to its max (dir=+1) or min (dir=-1) by repeated chains.
void push_count(const BinGraph& g, BinFlow& f, int j, int dir) {
  Residual r(g, f);
  std::vector<std::pair<int, int>> parent;
  if (dir > 0) {
    while (f.cnt[j] < g.count_hi[j]) {
      std::vector<int> sources;
      for (int k = 0; k < g.slots(); ++k)
        if (k != j && f.cnt[k] > g.count_lo[k]) sources.push_back(k);
      if (!r.find_chain(sources, j, parent)) break;
      r.apply_chain(j, parent);
    }
  } else {
    while (f.cnt[j] > g.count_lo[j]) {
      bool found = false;
      for (int k = 0; k < g.slots() && !found; ++k) {
        if (k == j || f.cnt[k] >= g.count_hi[k]) continue;
        if (r.find_chain({j}, k, parent)) {
          r.apply_chain(k, parent);
          found = true;
        }
      }
      if (!found) break;
    }
  }
}

}  // namespace

bool feasible(const BinGraph& g, std::span<const ArcFix> fixings) {
  std::vector<std::vector<int>> allowed = g.allowed;
  for (const ArcFix& fx : fixings) {
    auto& a = allowed[fx.var];
    if (fx.value == 0) {
      a.erase(std::remove(a.begin(), a.end(), fx.bin), a.end());
    } else {
      if (std::find(a.begin(), a.end(), fx.bin) == a.end()) return false;
      a = {fx.bin};
    }
  }
  return find_feasible(g, allowed).has_value();
}

std::optional<std::pair<int, int>> count_bounds(const BinGraph& g, int j) {
  auto f0 = find_feasible(g, g.allowed);
  if (!f0) return std::nullopt;
  BinFlow lo = *f0, hi = *f0;
  push_count(g, lo, j, -1);
  push_count(g, hi, j, +1);
  return std::make_pair(lo.cnt[j], hi.cnt[j]);
}

std::optional<std::pair<int, int>> arc_flow_bounds(const BinGraph& g, int i, int j) {
  if (!g.has_arc(i, j)) throw std::invalid_argument("arc_flow_bounds: no such arc");
  auto f0 = find_feasible(g, g.allowed);
  if (!f0) return std::nullopt;
  Reach r(g, *f0);
  if (f0->assign[i] == j) {
    // Can the unit leave?  Needs a residual cycle through (bin j -> var i).
    std::vector<char> seen = r.reach(i);
    return std::make_pair(seen[g.n + j] ? 0 : 1, 1);
  }
  std::vector<char> seen = r.reach(g.n + j);
  return std::make_pair(0, seen[i] ? 1 : 0);
}

FlowAnalysis analyze(const BinGraph& g, bool want_arcs) {
  FlowAnalysis out;
  auto f0 = find_feasible(g, g.allowed);
  if (!f0) return out;
  out.ok = true;
  const int S = g.slots();
  out.count_range.resize(S);
  for (int j = 0; j < S; ++j) {
    BinFlow lo = *f0, hi = *f0;
    push_count(g, lo, j, -1);
    push_count(g, hi, j, +1);
    out.count_range[j] = {lo.cnt[j], hi.cnt[j]};
  }
  if (!want_arcs) return out;
  Reach r(g, *f0);
  // From each bin: which vars can switch into it.
  std::vector<std::vector<char>> from_bin(S);
  for (int j = 0; j < S; ++j) from_bin[j] = r.reach(g.n + j);
  // From each var: can its unit leave its current bin.
  out.arc_range.resize(g.n);
  for (int i = 0; i < g.n; ++i) {
    std::vector<char> from_var;
    bool have = false;
    out.arc_range[i].resize(g.allowed[i].size());
    for (size_t a = 0; a < g.allowed[i].size(); ++a) {
      int j = g.allowed[i][a];
      if (f0->assign[i] == j) {
        if (!have) {
          from_var = r.reach(i);
          have = true;
        }
        out.arc_range[i][a] = {from_var[g.n + j] ? 0 : 1, 1};
      } else {
        out.arc_range[i][a] = {0, from_bin[j][i] ? 1 : 0};
      }
    }
  }
  return out;
}

std::string dump(const BinGraph& g) {
  std::string s;
  s += "n=" + std::to_string(g.n) + " m=" + std::to_string(g.bins.num_bins()) +
       " hidden=" + (g.hidden ? "true" : "false") + "\n";
  s += "bins:";
  for (int j = 0; j < g.bins.num_bins(); ++j)
    s += " [" + std::to_string(g.bins.lo(j)) + "," + std::to_string(g.bins.hi_excl(j)) + ")";
  s += "\n";
  for (int j = 0; j < g.slots(); ++j) {
    s += (j < g.bins.num_bins() ? "c" + std::to_string(j + 1) : std::string("c_hidden"));
    s += ": [" + std::to_string(g.count_lo[j]) + "," + std::to_string(g.count_hi[j]) + "]\n";
  }
  for (int i = 0; i < g.n; ++i) {
    if (g.no_arc[i]) {
      s += "x" + std::to_string(i + 1) + " -> (stranded)\n";
      continue;
    }
    for (size_t a = 0; a < g.allowed[i].size(); ++a) {
      int j = g.allowed[i][a];
      s += "x" + std::to_string(i + 1) + " -> " +
           (j < g.bins.num_bins() ? "c" + std::to_string(j + 1) : std::string("c_hidden")) +
           " : " + g.labels[i][a].to_string() + "\n";
    }
  }
  return s;
}

}  // namespace bincp
