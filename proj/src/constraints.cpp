#include "bincp/constraints.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

namespace bincp {

namespace {

class Linear : public Propagator {
 public:
  Linear(std::vector<LinTerm> terms, bool has_lo, long long lo, bool has_hi, long long hi)
      : terms_(std::move(terms)), has_lo_(has_lo), has_hi_(has_hi), lo_(lo), hi_(hi) {}

  void attach(Solver& s) override {
    for (const LinTerm& t : terms_) s.subscribe(t.var, this, kOnBounds);
  }

  bool propagate(Solver& s, VarId) override {
    long long smin = 0, smax = 0;
    for (const LinTerm& t : terms_) {
      long long a = s.min(t.var), b = s.max(t.var);
      smin += t.coef >= 0 ? t.coef * a : t.coef * b;
      smax += t.coef >= 0 ? t.coef * b : t.coef * a;
    }
    if (has_hi_ && smin > hi_) return false;
    if (has_lo_ && smax < lo_) return false;
    for (const LinTerm& t : terms_) {
      long long a = s.min(t.var), b = s.max(t.var);
      long long tmin = t.coef >= 0 ? t.coef * a : t.coef * b;
      long long tmax = t.coef >= 0 ? t.coef * b : t.coef * a;
      if (has_hi_) {
        // t.coef * x <= hi - (smin - tmin)
        long long room = hi_ - (smin - tmin);
        if (t.coef > 0) {
          if (!s.set_max(t.var, (int)floor_div(room, t.coef))) return false;
        } else if (t.coef < 0) {
          if (!s.set_min(t.var, (int)ceil_div(room, t.coef))) return false;
        }
      }
      if (has_lo_) {
        // t.coef * x >= lo - (smax - tmax)
        long long need = lo_ - (smax - tmax);
        if (t.coef > 0) {
          if (!s.set_min(t.var, (int)ceil_div(need, t.coef))) return false;
        } else if (t.coef < 0) {
          if (!s.set_max(t.var, (int)floor_div(need, t.coef))) return false;
        }
      }
    }
    return true;
  }

 private:
  static long long floor_div(long long a, long long b) {
    long long q = a / b, r = a % b;
    return (r != 0 && ((r < 0) != (b < 0))) ? q - 1 : q;
  }
  static long long ceil_div(long long a, long long b) { return -floor_div(-a, b); }

  std::vector<LinTerm> terms_;
  bool has_lo_, has_hi_;
  long long lo_, hi_;
};

// Matching-based distinctness filter: a maximum var-value matching must
// cover every variable; an unmatched edge survives only if it lies on an
// alternating cycle, i.e. its endpoints share a residual SCC.
class AllDifferentMatching : public Propagator {
 public:
  explicit AllDifferentMatching(std::vector<VarId> vars) : vars_(std::move(vars)) {}

  void attach(Solver& s) override {
    for (VarId v : vars_) s.subscribe(v, this, kOnChange);
  }

  bool propagate(Solver& s, VarId) override {
    const int n = (int)vars_.size();
    // Dense value indexing.
    vals_.clear();
    val_index_.clear();
    adj_.assign(n, {});
    for (int i = 0; i < n; ++i) {
      s.dom(vars_[i]).for_each([&](int v) {
        auto [it, inserted] = val_index_.try_emplace(v, (int)vals_.size());
        if (inserted) vals_.push_back(v);
        adj_[i].push_back(it->second);
      });
    }
    const int nv = (int)vals_.size();
    if (nv < n) return false;

    match_of_var_.assign(n, -1);
    match_of_val_.assign(nv, -1);
    for (int i = 0; i < n; ++i) {
      seen_.assign(nv, false);
      if (!augment(i)) return false;
    }

    // Residual digraph over nodes: vars [0,n), values [n,n+nv), sink n+nv.
    // var->val for unmatched edges, val->var for matched ones,
    // val->sink if the value is free, sink->val if it is matched.
    const int sink = n + nv;
    radj_.assign(sink + 1, {});
    for (int i = 0; i < n; ++i)
      for (int k : adj_[i]) {
        if (match_of_var_[i] == k)
          radj_[n + k].push_back(i);
        else
          radj_[i].push_back(n + k);
      }
    for (int k = 0; k < nv; ++k) {
      if (match_of_val_[k] < 0)
        radj_[n + k].push_back(sink);
      else
        radj_[sink].push_back(n + k);
    }
    scc_of_.assign(sink + 1, -1);
    tarjan(sink + 1);

    for (int i = 0; i < n; ++i)
      for (int k : adj_[i]) {
        if (match_of_var_[i] == k) continue;
        if (scc_of_[i] != scc_of_[n + k]) {
          if (!s.remove_value(vars_[i], vals_[k])) return false;
        }
      }
    return true;
  }

 private:
  bool augment(int i) {
    for (int k : adj_[i]) {
      if (seen_[k]) continue;
      seen_[k] = true;
      if (match_of_val_[k] < 0 || augment(match_of_val_[k])) {
        match_of_var_[i] = k;
        match_of_val_[k] = i;
        return true;
      }
    }
    return false;
  }

  // Iterative Tarjan.
  void tarjan(int num_nodes) {
    index_.assign(num_nodes, -1);
    low_.assign(num_nodes, 0);
    on_stack_.assign(num_nodes, false);
    stack_.clear();
    int next_index = 0, next_scc = 0;
    struct Frame {
      int node;
      size_t edge;
    };
    std::vector<Frame> call;
    for (int start = 0; start < num_nodes; ++start) {
      if (index_[start] != -1) continue;
      call.push_back({start, 0});
      index_[start] = low_[start] = next_index++;
      stack_.push_back(start);
      on_stack_[start] = true;
      while (!call.empty()) {
        Frame& f = call.back();
        if (f.edge < radj_[f.node].size()) {
          int w = radj_[f.node][f.edge++];
          if (index_[w] == -1) {
            index_[w] = low_[w] = next_index++;
            stack_.push_back(w);
            on_stack_[w] = true;
            call.push_back({w, 0});
          } else if (on_stack_[w]) {
            low_[f.node] = std::min(low_[f.node], index_[w]);
          }
        } else {
          int u = f.node;
          call.pop_back();
          if (!call.empty())
            low_[call.back().node] = std::min(low_[call.back().node], low_[u]);
          if (low_[u] == index_[u]) {
            for (;;) {
              int w = stack_.back();
              stack_.pop_back();
              on_stack_[w] = false;
              scc_of_[w] = next_scc;
              if (w == u) break;
            }
            ++next_scc;
          }
        }
      }
    }
  }

  std::vector<VarId> vars_;
  std::vector<int> vals_;
  std::unordered_map<int, int> val_index_;
  std::vector<std::vector<int>> adj_, radj_;
  std::vector<int> match_of_var_, match_of_val_;
  std::vector<char> seen_;
  std::vector<int> index_, low_, scc_of_;
  std::vector<char> on_stack_;
  std::vector<int> stack_;
};

// Weak fallback: when a variable is fixed, drop its value elsewhere.
class AllDifferentPairwise : public Propagator {
 public:
  explicit AllDifferentPairwise(std::vector<VarId> vars) : vars_(std::move(vars)) {}
  void attach(Solver& s) override {
    for (VarId v : vars_) s.subscribe(v, this, kOnFix);
  }
  bool propagate(Solver& s, VarId) override {
    for (size_t i = 0; i < vars_.size(); ++i) {
      if (!s.fixed(vars_[i])) continue;
      int val = s.value(vars_[i]);
      for (size_t j = 0; j < vars_.size(); ++j) {
        if (j == i || !s.contains(vars_[j], val)) continue;
        if (s.fixed(vars_[j])) return false;
        if (!s.remove_value(vars_[j], val)) return false;
      }
    }
    return true;
  }

 private:
  std::vector<VarId> vars_;
};

class Element : public Propagator {
 public:
  Element(VarId result, std::vector<int> table, VarId index)
      : result_(result), table_(std::move(table)), index_(index) {}

  void attach(Solver& s) override {
    s.subscribe(result_, this, kOnChange);
    s.subscribe(index_, this, kOnChange);
  }

  bool propagate(Solver& s, VarId) override {
    const int n = (int)table_.size();
    if (!s.set_min(index_, 1) || !s.set_max(index_, n)) return false;
    // Supported indices and the values they reach.
    std::vector<int> dead_idx, live_vals;
    s.dom(index_).for_each([&](int i) {
      if (s.contains(result_, table_[i - 1]))
        live_vals.push_back(table_[i - 1]);
      else
        dead_idx.push_back(i);
    });
    for (int i : dead_idx)
      if (!s.remove_value(index_, i)) return false;
    IntervalSet keep = IntervalSet::from_values(live_vals);
    std::vector<int> dead_vals;
    s.dom(result_).for_each([&](int v) {
      if (!keep.contains(v)) dead_vals.push_back(v);
    });
    for (int v : dead_vals)
      if (!s.remove_value(result_, v)) return false;
    return true;
  }

 private:
  VarId result_;
  std::vector<int> table_;
  VarId index_;
};

class Gcc : public Propagator {
 public:
  Gcc(std::vector<VarId> vars, std::vector<int> values, std::vector<VarId> counts)
      : vars_(std::move(vars)), values_(std::move(values)), counts_(std::move(counts)) {}

  void attach(Solver& s) override {
    for (VarId v : vars_) s.subscribe(v, this, kOnChange);
    for (VarId c : counts_) s.subscribe(c, this, kOnBounds);
  }

  bool propagate(Solver& s, VarId) override {
    const int nv = (int)values_.size();
    for (int k = 0; k < nv; ++k) {
      int fixed_here = 0, possible = 0;
      for (VarId x : vars_) {
        if (!s.contains(x, values_[k])) continue;
        ++possible;
        if (s.fixed(x)) ++fixed_here;
      }
      if (!s.set_min(counts_[k], fixed_here)) return false;
      if (!s.set_max(counts_[k], possible)) return false;
      if (s.max(counts_[k]) == fixed_here) {
        // Saturated: unfixed variables lose the value.
        for (VarId x : vars_)
          if (!s.fixed(x) && s.contains(x, values_[k]))
            if (!s.remove_value(x, values_[k])) return false;
      }
      if (s.min(counts_[k]) == possible) {
        // Every candidate is needed.
        for (VarId x : vars_)
          if (s.contains(x, values_[k]) && !s.fixed(x))
            if (!s.assign(x, values_[k])) return false;
      }
    }
    return true;
  }

 private:
  std::vector<VarId> vars_;
  std::vector<int> values_;
  std::vector<VarId> counts_;
};

class BinPacking : public Propagator {
 public:
  BinPacking(std::vector<VarId> bin_of, std::vector<long long> weights, std::vector<VarId> loads)
      : bin_of_(std::move(bin_of)), weights_(std::move(weights)), loads_(std::move(loads)) {}

  void attach(Solver& s) override {
    for (VarId v : bin_of_) s.subscribe(v, this, kOnChange);
    for (VarId l : loads_) s.subscribe(l, this, kOnBounds);
  }

  bool propagate(Solver& s, VarId) override {
    const int nbins = (int)loads_.size();
    const int n = (int)bin_of_.size();
    for (int i = 0; i < n; ++i) {
      if (!s.set_min(bin_of_[i], 1) || !s.set_max(bin_of_[i], nbins)) return false;
    }
    std::vector<long long> committed(nbins, 0), possible(nbins, 0);
    for (int i = 0; i < n; ++i) {
      if (s.fixed(bin_of_[i])) {
        int j = s.value(bin_of_[i]) - 1;
        committed[j] += weights_[i];
        possible[j] += weights_[i];
      } else {
        s.dom(bin_of_[i]).for_each([&](int j) { possible[j - 1] += weights_[i]; });
      }
    }
    for (int j = 0; j < nbins; ++j) {
      if (committed[j] > (long long)INT32_MAX || possible[j] > (long long)INT32_MAX)
        throw std::overflow_error("bin_packing: load exceeds int range");
      if (!s.set_min(loads_[j], (int)committed[j])) return false;
      if (!s.set_max(loads_[j], (int)possible[j])) return false;
    }
    for (int i = 0; i < n; ++i) {
      if (s.fixed(bin_of_[i])) continue;
      std::vector<int> drop, forced;
      s.dom(bin_of_[i]).for_each([&](int jj) {
        int j = jj - 1;
        if (committed[j] + weights_[i] > s.max(loads_[j]))
          drop.push_back(jj);
        else if (possible[j] - weights_[i] < s.min(loads_[j]))
          forced.push_back(jj);  // without item i the bin misses its minimum
      });
      if (forced.size() > 1) return false;
      for (int jj : drop)
        if (!s.remove_value(bin_of_[i], jj)) return false;
      if (forced.size() == 1 && s.contains(bin_of_[i], forced[0]))
        if (!s.assign(bin_of_[i], forced[0])) return false;
    }
    return true;
  }

 private:
  std::vector<VarId> bin_of_;
  std::vector<long long> weights_;
  std::vector<VarId> loads_;
};

// Shared core of the two chi-square propagators: terms are kept as
// scaled integers term_k(v) = (v - t_k)^2 * (L / t_k) with L = lcm(targets),
// so Sum(term_k) = L * statistic exactly.
struct ScaledTerms {
  std::vector<long long> coef;  // L / t_k
  long long scale;

  ScaledTerms(std::span<const long long> targets) {
    scale = chi2_scale(targets);
    for (long long t : targets) coef.push_back(scale / t);
  }

  long long term(int k, long long v, long long target) const {
    return (v - target) * (v - target) * coef[k];
  }
};

class Chi2Threshold : public Propagator {
 public:
  Chi2Threshold(std::vector<VarId> counts, std::vector<long long> targets, double threshold)
      : counts_(std::move(counts)), targets_(std::move(targets)), terms_(targets_) {
    // statistic <= threshold + 1e-12, i.e. scaled sum <= floor(L*(threshold+1e-12))
    double lim = (double)terms_.scale * (threshold + 1e-12);
    if (lim >= 9e18) throw std::overflow_error("chi2 threshold out of range");
    max_scaled_ = lim < 0 ? -1 : (long long)lim;
  }

  void attach(Solver& s) override {
    for (VarId c : counts_) s.subscribe(c, this, kOnChange);
  }

  bool propagate(Solver& s, VarId) override {
    const int m = (int)counts_.size();
    min_term_.assign(m, 0);
    long long total_min = 0;
    for (int k = 0; k < m; ++k) {
      min_term_[k] = best_term(s, k);
      total_min += min_term_[k];
    }
    if (total_min > max_scaled_) return false;
    for (int k = 0; k < m; ++k) {
      long long rest = total_min - min_term_[k];
      std::vector<int> drop;
      s.dom(counts_[k]).for_each([&](int v) {
        if (terms_.term(k, v, targets_[k]) + rest > max_scaled_) drop.push_back(v);
      });
      for (int v : drop)
        if (!s.remove_value(counts_[k], v)) return false;
    }
    return true;
  }

 private:
  long long best_term(Solver& s, int k) const {
    const IntervalSet& d = s.dom(counts_[k]);
    int t = (int)targets_[k];
    long long best = -1;
    int up = d.next_ge(t, INT32_MIN), down = d.prev_le(t, INT32_MIN);
    if (up != INT32_MIN) best = terms_.term(k, up, targets_[k]);
    if (down != INT32_MIN) {
      long long b2 = terms_.term(k, down, targets_[k]);
      if (best < 0 || b2 < best) best = b2;
    }
    assert(best >= 0);
    return best;
  }

  std::vector<VarId> counts_;
  std::vector<long long> targets_;
  ScaledTerms terms_;
  long long max_scaled_;
  std::vector<long long> min_term_;
};

class ScaledChi2LeVar : public Propagator {
 public:
  ScaledChi2LeVar(std::vector<VarId> counts, std::vector<long long> targets, VarId bound)
      : counts_(std::move(counts)), targets_(std::move(targets)), terms_(targets_), bound_(bound) {}

  void attach(Solver& s) override {
    for (VarId c : counts_) s.subscribe(c, this, kOnChange);
    s.subscribe(bound_, this, kOnBounds);
  }

  bool propagate(Solver& s, VarId) override {
    const int m = (int)counts_.size();
    min_term_.assign(m, 0);
    long long total_min = 0;
    for (int k = 0; k < m; ++k) {
      const IntervalSet& d = s.dom(counts_[k]);
      int t = (int)targets_[k];
      long long best = -1;
      int up = d.next_ge(t, INT32_MIN), down = d.prev_le(t, INT32_MIN);
      if (up != INT32_MIN) best = terms_.term(k, up, targets_[k]);
      if (down != INT32_MIN) {
        long long b2 = terms_.term(k, down, targets_[k]);
        if (best < 0 || b2 < best) best = b2;
      }
      min_term_[k] = best;
      total_min += best;
    }
    if (total_min > (long long)INT32_MAX) return false;
    if (!s.set_min(bound_, (int)total_min)) return false;
    long long max_allowed = s.max(bound_);
    for (int k = 0; k < m; ++k) {
      long long rest = total_min - min_term_[k];
      std::vector<int> drop;
      s.dom(counts_[k]).for_each([&](int v) {
        if (terms_.term(k, v, targets_[k]) + rest > max_allowed) drop.push_back(v);
      });
      for (int v : drop)
        if (!s.remove_value(counts_[k], v)) return false;
    }
    return true;
  }

 private:
  std::vector<VarId> counts_;
  std::vector<long long> targets_;
  ScaledTerms terms_;
  VarId bound_;
  std::vector<long long> min_term_;
};

}  // namespace

long long chi2_scale(std::span<const long long> targets) {
  long long l = 1;
  for (long long t : targets) {
    if (t <= 0) throw std::invalid_argument("chi2: targets must be positive");
    l = std::lcm(l, t);
    if (l > (1LL << 40)) throw std::overflow_error("chi2: target lcm too large");
  }
  return l;
}

void post_linear(Solver& s, std::vector<LinTerm> terms, LinRel rel, long long rhs) {
  bool has_lo = rel == LinRel::kEq || rel == LinRel::kGe;
  bool has_hi = rel != LinRel::kGe;
  long long hi = rel == LinRel::kLt ? rhs - 1 : rhs;
  s.post(std::make_unique<Linear>(std::move(terms), has_lo, rhs, has_hi, hi));
}

void post_less(Solver& s, VarId x, VarId y) {
  post_linear(s, {{1, x}, {-1, y}}, LinRel::kLt, 0);
}

void post_all_different(Solver& s, std::vector<VarId> vars, bool matching) {
  if (matching)
    s.post(std::make_unique<AllDifferentMatching>(std::move(vars)));
  else
    s.post(std::make_unique<AllDifferentPairwise>(std::move(vars)));
}

void post_element(Solver& s, VarId result, std::vector<int> table, VarId index) {
  if (table.empty()) throw std::invalid_argument("element: empty table");
  s.post(std::make_unique<Element>(result, std::move(table), index));
}

void post_gcc(Solver& s, std::vector<VarId> vars, std::vector<int> values,
              std::vector<VarId> counts) {
  if (values.size() != counts.size()) throw std::invalid_argument("gcc: size mismatch");
  {
    std::vector<int> v = values;
    std::sort(v.begin(), v.end());
    if (std::adjacent_find(v.begin(), v.end()) != v.end())
      throw std::invalid_argument("gcc: duplicate values");
  }
  // If the value list covers every domain, the counts must add up to the
  // number of variables; post that sum as a redundant bound.
  IntervalSet covered = IntervalSet::from_values(values);
  bool covers = true;
  for (VarId x : vars) {
    bool in = true;
    s.dom(x).for_each([&](int v) { in = in && covered.contains(v); });
    if (!in) {
      covers = false;
      break;
    }
  }
  if (covers) {
    std::vector<LinTerm> terms;
    for (VarId c : counts) terms.push_back({1, c});
    post_linear(s, std::move(terms), LinRel::kEq, (long long)vars.size());
  }
  s.post(std::make_unique<Gcc>(std::move(vars), std::move(values), std::move(counts)));
}

void post_bin_packing(Solver& s, std::vector<VarId> bin_of, std::vector<long long> weights,
                      std::vector<VarId> loads) {
  if (bin_of.size() != weights.size()) throw std::invalid_argument("bin_packing: size mismatch");
  for (long long w : weights)
    if (w < 0) throw std::invalid_argument("bin_packing: negative weight");
  long long total = std::accumulate(weights.begin(), weights.end(), 0LL);
  std::vector<LinTerm> terms;
  for (VarId l : loads) terms.push_back({1, l});
  post_linear(s, std::move(terms), LinRel::kEq, total);
  s.post(std::make_unique<BinPacking>(std::move(bin_of), std::move(weights), std::move(loads)));
}

void post_chi2_threshold(Solver& s, std::vector<VarId> counts, std::vector<long long> targets,
                         double threshold) {
  if (counts.size() != targets.size()) throw std::invalid_argument("chi2: size mismatch");
  s.post(std::make_unique<Chi2Threshold>(std::move(counts), std::move(targets), threshold));
}

void post_scaled_chi2_le(Solver& s, std::vector<VarId> counts, std::vector<long long> targets,
                         VarId bound) {
  if (counts.size() != targets.size()) throw std::invalid_argument("chi2: size mismatch");
  s.post(std::make_unique<ScaledChi2LeVar>(std::move(counts), std::move(targets), bound));
}

}  // namespace bincp
