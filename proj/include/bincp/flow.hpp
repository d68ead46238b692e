#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "bincp/bins.hpp"
#include "bincp/intervalset.hpp"

namespace bincp {

// Bipartite assignment network: every variable ships one unit into the bin
// holding its value; bin j must collect between count_lo[j] and count_hi[j]
// units. An arc (i,j) exists iff the variable's domain meets bin j; its
// label is that intersection. With hidden_bin, an extra unconstrained bin
// (index num_bins) absorbs out-of-range values.
struct BinGraph {
  int n = 0;                              // variables
  BinSpec bins;                           // visible bins
  bool hidden = false;
  std::vector<std::vector<int>> allowed;  // per var: bin indices with an arc
  std::vector<std::vector<IntervalSet>> labels;  // parallel to allowed
  std::vector<int> count_lo, count_hi;    // per slot (visible bins + hidden)
  std::vector<char> no_arc;               // per var: true if no bin reachable

  int slots() const { return bins.num_bins() + (hidden ? 1 : 0); }
  bool has_arc(int i, int j) const;
  // True if some variable cannot be placed at all (strict mode wipeout).
  bool stranded_var() const;
};

BinGraph build_graph(std::span<const IntervalSet> domains, const BinSpec& bins,
                     std::span<const std::pair<int, int>> count_bounds, bool hidden_bin);

// One unit-per-variable flow satisfying all count bounds.
struct BinFlow {
  std::vector<int> assign;  // bin index per var
  std::vector<int> cnt;     // per slot
};

struct ArcFix {
  int var;
  int bin;
  int value;  // 0 or 1
};

// Exact feasibility of the network, optionally with arcs pinned to 0/1.
bool feasible(const BinGraph& g, std::span<const ArcFix> fixings = {});

// Range of achievable inflow for bin j; nullopt if the network is infeasible.
std::optional<std::pair<int, int>> count_bounds(const BinGraph& g, int j);

// Range of f_ij over all feasible flows for an existing arc (i,j);
// nullopt if the network is infeasible as a whole.
std::optional<std::pair<int, int>> arc_flow_bounds(const BinGraph& g, int i, int j);

// Everything the filtering pass needs, from a single feasible flow:
// per-slot count ranges and per-arc flow ranges (indexed like g.allowed).
struct FlowAnalysis {
  bool ok = false;
  std::vector<std::pair<int, int>> count_range;          // per slot
  std::vector<std::vector<std::pair<int, int>>> arc_range;  // per var, per arc
};
FlowAnalysis analyze(const BinGraph& g, bool want_arcs);

// Structured text dump (stable format, used by golden tests).
std::string dump(const BinGraph& g);

}  // namespace bincp
