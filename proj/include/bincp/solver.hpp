#pragma once

#include <chrono>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bincp/intervalset.hpp"

namespace bincp {

using VarId = int;
using BoolId = int;
inline constexpr VarId kNoVar = -1;

// Events a propagator can subscribe to per variable.
enum EventMask : unsigned {
  kOnChange = 1u,  // any value removed
  kOnBounds = 2u,  // min or max moved
  kOnFix = 4u,     // became a singleton
};

class Solver;

class Propagator {
 public:
  virtual ~Propagator() = default;
  // Subscribe to variables; called once when posted.
  virtual void attach(Solver& s) = 0;
  // Filter. `trigger` is the variable whose change scheduled this run,
  // kNoVar at the initial run or when several variables changed.
  // Returns false on wipeout.
  virtual bool propagate(Solver& s, VarId trigger) = 0;

 private:
  friend class Solver;
  bool queued_ = false;
  bool trigger_known_ = false;
  VarId trigger_ = kNoVar;
};

struct SearchStats {
  long long nodes = 0;      // root + every branching decision applied
  long long failures = 0;   // propagation wipeouts
  long long solutions = 0;
  double time_s = 0.0;
};

enum class SearchStatus { kSat, kUnsat, kTimeout };

enum class Branching {
  kMinDomMinValue,  // smallest domain first, ties by position; try min value
  kLexMinValue,     // fixed order; try min value
};

// Domain snapshot taken at a solution.
struct Solution {
  std::vector<IntervalSet> domains;
  bool fixed(VarId v) const { return domains[v].fixed(); }
  int value(VarId v) const { return domains[v].min(); }
  int min(VarId v) const { return domains[v].min(); }
  int max(VarId v) const { return domains[v].max(); }
};

struct SearchResult {
  SearchStatus status;
  std::optional<Solution> solution;  // present iff a solution was found
};

class Solver {
 public:
  // --- variables ---
  VarId new_var(IntervalSet dom, std::string name = "");
  int num_vars() const { return (int)doms_.size(); }
  const IntervalSet& dom(VarId v) const { return doms_[v]; }
  const std::string& name(VarId v) const { return names_[v]; }
  int min(VarId v) const { return doms_[v].min(); }
  int max(VarId v) const { return doms_[v].max(); }
  bool contains(VarId v, int val) const { return doms_[v].contains(val); }
  bool fixed(VarId v) const { return doms_[v].fixed(); }
  int value(VarId v) const { return doms_[v].min(); }  // requires fixed
  long long dom_size(VarId v) const { return doms_[v].size(); }

  // --- domain mutation; false means wipeout (solver enters failed state) ---
  bool remove_value(VarId v, int val);
  bool remove_range(VarId v, int lo, int hi);  // closed range
  bool set_min(VarId v, int lo);
  bool set_max(VarId v, int hi);
  bool assign(VarId v, int val);
  bool failed() const { return failed_; }

  // --- trail-restored booleans ---
  BoolId new_stored_bool(bool init);
  bool bool_value(BoolId b) const { return bools_[b] != 0; }
  void set_bool(BoolId b, bool val);

  // --- propagators ---
  void post(std::unique_ptr<Propagator> p);
  void subscribe(VarId v, Propagator* p, unsigned mask);
  bool propagate();  // run to fixpoint; false = failed

  // --- trail ---
  int depth() const { return (int)marks_.size(); }
  int push_level();
  void backtrack_to(int depth);  // restores domains and bools bit-exactly

  // --- search ---
  SearchResult solve(std::span<const VarId> goal, Branching b, SearchStats& stats,
                     double time_limit_s = std::numeric_limits<double>::infinity());
  // Minimizes `objective` by iterated solving with a strict-improvement bound,
  // restarting from the root after each incumbent.
  SearchResult minimize(VarId objective, std::span<const VarId> goal, Branching b,
                        SearchStats& stats,
                        double time_limit_s = std::numeric_limits<double>::infinity());

 private:
  struct TrailEntry {
    enum Kind { kDomain, kBool } kind;
    int id;
    IntervalSet removed;  // kDomain
    bool old_value;       // kBool
  };

  bool apply_removal(VarId v, IntervalSet removed, int old_min, int old_max);
  void enqueue(Propagator* p, VarId trigger, bool known_trigger);
  void clear_queue();
  bool dfs(std::span<const VarId> goal, Branching b, SearchStats& stats,
           std::chrono::steady_clock::time_point deadline, SearchResult& out);
  VarId pick_var(std::span<const VarId> goal, Branching b) const;

  std::vector<IntervalSet> doms_;
  std::vector<std::string> names_;
  std::vector<std::vector<std::pair<Propagator*, unsigned>>> watchers_;
  std::vector<char> bools_;
  std::vector<std::unique_ptr<Propagator>> props_;
  std::vector<TrailEntry> trail_;
  std::vector<size_t> marks_;
  std::vector<Propagator*> queue_;
  size_t queue_head_ = 0;
  bool failed_ = false;
};

}  // namespace bincp
