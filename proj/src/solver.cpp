#include "bincp/solver.hpp"

#include <algorithm>
#include <cassert>
#include <stdexcept>

namespace bincp {

VarId Solver::new_var(IntervalSet dom, std::string name) {
  if (dom.empty()) throw std::invalid_argument("new_var: empty domain");
  if (depth() != 0) throw std::logic_error("new_var: only at root");
  VarId id = (VarId)doms_.size();
  doms_.push_back(std::move(dom));
  if (name.empty()) name = "v" + std::to_string(id);
  names_.push_back(std::move(name));
  watchers_.emplace_back();
  return id;
}

BoolId Solver::new_stored_bool(bool init) {
  bools_.push_back(init ? 1 : 0);
  return (BoolId)bools_.size() - 1;
}

void Solver::set_bool(BoolId b, bool val) {
  if (bool_value(b) == val) return;
  trail_.push_back({TrailEntry::kBool, b, {}, bool_value(b)});
  bools_[b] = val ? 1 : 0;
}

void Solver::subscribe(VarId v, Propagator* p, unsigned mask) {
  watchers_[v].emplace_back(p, mask);
}

void Solver::post(std::unique_ptr<Propagator> p) {
  if (depth() != 0) throw std::logic_error("post: only at root");
  Propagator* raw = p.get();
  props_.push_back(std::move(p));
  raw->attach(*this);
  enqueue(raw, kNoVar, false);
}

void Solver::enqueue(Propagator* p, VarId trigger, bool known_trigger) {
  if (p->queued_) {
    if (!known_trigger || (p->trigger_known_ && p->trigger_ != trigger)) {
      p->trigger_known_ = false;
      p->trigger_ = kNoVar;
    }
    return;
  }
  p->queued_ = true;
  p->trigger_known_ = known_trigger;
  p->trigger_ = known_trigger ? trigger : kNoVar;
  queue_.push_back(p);
}

void Solver::clear_queue() {
  for (size_t i = queue_head_; i < queue_.size(); ++i) {
    queue_[i]->queued_ = false;
    queue_[i]->trigger_known_ = false;
    queue_[i]->trigger_ = kNoVar;
  }
  queue_.clear();
  queue_head_ = 0;
}

bool Solver::apply_removal(VarId v, IntervalSet removed, int old_min, int old_max) {
  if (removed.empty()) return true;
  unsigned events = kOnChange;
  if (doms_[v].empty()) {
    // Wipeout: record for exact restore, then fail without waking anyone.
    trail_.push_back({TrailEntry::kDomain, v, std::move(removed), false});
    failed_ = true;
    return false;
  }
  if (doms_[v].min() != old_min || doms_[v].max() != old_max) events |= kOnBounds;
  if (doms_[v].fixed()) events |= kOnFix;
  trail_.push_back({TrailEntry::kDomain, v, std::move(removed), false});
  for (auto& [p, mask] : watchers_[v])
    if (mask & events) enqueue(p, v, true);
  return true;
}

bool Solver::remove_value(VarId v, int val) {
  if (failed_) return false;
  int lo = doms_[v].min(), hi = doms_[v].max();
  return apply_removal(v, doms_[v].erase_value(val), lo, hi);
}

bool Solver::remove_range(VarId v, int lo, int hi) {
  if (failed_) return false;
  int a = doms_[v].min(), b = doms_[v].max();
  return apply_removal(v, doms_[v].erase_range(lo, hi), a, b);
}

bool Solver::set_min(VarId v, int lo) {
  if (failed_) return false;
  int a = doms_[v].min(), b = doms_[v].max();
  if (lo <= a) return true;
  return apply_removal(v, doms_[v].erase_range(a, lo - 1), a, b);
}

bool Solver::set_max(VarId v, int hi) {
  if (failed_) return false;
  int a = doms_[v].min(), b = doms_[v].max();
  if (hi >= b) return true;
  return apply_removal(v, doms_[v].erase_range(hi + 1, b), a, b);
}

bool Solver::assign(VarId v, int val) {
  if (failed_) return false;
  int a = doms_[v].min(), b = doms_[v].max();
  if (!doms_[v].contains(val)) {
    return apply_removal(v, doms_[v].erase_range(a, b), a, b);
  }
  IntervalSet removed = doms_[v].erase_range(a, val - 1);
  removed.insert_disjoint(doms_[v].erase_range(val + 1, b));
  return apply_removal(v, std::move(removed), a, b);
}

bool Solver::propagate() {
  if (failed_) return false;
  while (queue_head_ < queue_.size()) {
    Propagator* p = queue_[queue_head_++];
    if (queue_head_ > 4096 && queue_head_ * 2 > queue_.size()) {
      queue_.erase(queue_.begin(), queue_.begin() + queue_head_);
      queue_head_ = 0;
    }
    p->queued_ = false;
    VarId trig = p->trigger_known_ ? p->trigger_ : kNoVar;
    p->trigger_known_ = false;
    p->trigger_ = kNoVar;
    if (!p->propagate(*this, trig) || failed_) {
      failed_ = true;
      clear_queue();
      return false;
    }
  }
  queue_.clear();
  queue_head_ = 0;
  return true;
}

int Solver::push_level() {
  marks_.push_back(trail_.size());
  return depth();
}

void Solver::backtrack_to(int d) {
  assert(d >= 0 && d <= depth());
  while (depth() > d) {
    size_t mark = marks_.back();
    marks_.pop_back();
    while (trail_.size() > mark) {
      TrailEntry& e = trail_.back();
      if (e.kind == TrailEntry::kDomain)
        doms_[e.id].insert_disjoint(e.removed);
      else
        bools_[e.id] = e.old_value ? 1 : 0;
      trail_.pop_back();
    }
  }
  failed_ = false;
  clear_queue();
}

VarId Solver::pick_var(std::span<const VarId> goal, Branching b) const {
  VarId best = kNoVar;
  long long best_size = 0;
  for (VarId v : goal) {
    if (doms_[v].fixed()) continue;
    if (b == Branching::kLexMinValue) return v;
    long long sz = doms_[v].size();
    if (best == kNoVar || sz < best_size) {
      best = v;
      best_size = sz;
    }
  }
  return best;
}

bool Solver::dfs(std::span<const VarId> goal, Branching b, SearchStats& stats,
                 std::chrono::steady_clock::time_point deadline, SearchResult& out) {
  if (std::chrono::steady_clock::now() >= deadline) {
    out.status = SearchStatus::kTimeout;
    return true;  // stop
  }
  if (!propagate()) {
    ++stats.failures;
    return false;
  }
  VarId x = pick_var(goal, b);
  if (x == kNoVar) {
    ++stats.solutions;
    out.status = SearchStatus::kSat;
    out.solution = Solution{doms_};
    return true;
  }
  int v = doms_[x].min();
  ++stats.nodes;
  int d = push_level();
  if (assign(x, v)) {
    if (dfs(goal, b, stats, deadline, out)) return true;
  } else {
    ++stats.failures;
  }
  backtrack_to(d - 1);

  ++stats.nodes;
  d = push_level();
  if (remove_value(x, v)) {
    if (dfs(goal, b, stats, deadline, out)) return true;
  } else {
    ++stats.failures;
  }
  backtrack_to(d - 1);
  return false;
}

SearchResult Solver::solve(std::span<const VarId> goal, Branching b, SearchStats& stats,
                           double time_limit_s) {
  auto t0 = std::chrono::steady_clock::now();
  auto deadline = (time_limit_s == std::numeric_limits<double>::infinity())
                      ? std::chrono::steady_clock::time_point::max()
                      : t0 + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                                 std::chrono::duration<double>(time_limit_s));
  SearchResult out{SearchStatus::kUnsat, std::nullopt};
  int root = depth();
  ++stats.nodes;  // root
  dfs(goal, b, stats, deadline, out);
  backtrack_to(root);
  stats.time_s += std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

SearchResult Solver::minimize(VarId objective, std::span<const VarId> goal, Branching b,
                              SearchStats& stats, double time_limit_s) {
  auto t0 = std::chrono::steady_clock::now();
  std::vector<VarId> goal2(goal.begin(), goal.end());
  if (std::find(goal2.begin(), goal2.end(), objective) == goal2.end())
    goal2.push_back(objective);

  SearchResult best{SearchStatus::kUnsat, std::nullopt};
  for (;;) {
    double left = time_limit_s;
    if (time_limit_s != std::numeric_limits<double>::infinity()) {
      left = time_limit_s -
             std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      if (left <= 0) {
        best.status = SearchStatus::kTimeout;
        return best;
      }
    }
    SearchResult r = solve(goal2, b, stats, left);
    if (r.status == SearchStatus::kTimeout) {
      best.status = SearchStatus::kTimeout;
      return best;  // best.solution holds the incumbent, if any
    }
    if (r.status == SearchStatus::kUnsat) {
      // No better solution: the incumbent (if any) is optimal.
      if (best.solution) best.status = SearchStatus::kSat;
      return best;
    }
    best = r;
    int incumbent = r.solution->min(objective);
    if (!set_max(objective, incumbent - 1) || !propagate()) {
      backtrack_to(0);  // restores nothing at root but clears failed state
      best.status = SearchStatus::kSat;
      return best;
    }
  }
}

}  // namespace bincp
