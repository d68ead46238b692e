#pragma once

#include <span>
#include <vector>

#include "bincp/bins.hpp"
#include "bincp/flow.hpp"
#include "bincp/solver.hpp"

namespace bincp {

enum class BinMode {
  kStrict,     // every value must land in a bin; counts add up to n
  kHiddenBin,  // out-of-range values allowed; visible counts add up to <= n
};

// counts[j] = |{i : values[i] in [bins[j], bins[j+1])}|.
// Strict mode rejects values outside every bin.
bool check_bin_counts(std::span<const int> values, std::span<const int> counts,
                      const BinSpec& bins, BinMode mode);

// Plain counting; fails (nullopt) in strict mode on an out-of-range value.
std::optional<std::vector<int>> bin_count(std::span<const int> values, const BinSpec& bins,
                                          BinMode mode);

struct BinCountsVars {
  std::vector<VarId> xs;      // the counted variables
  std::vector<VarId> counts;  // one per bin
  BinSpec bins;
  BinMode mode = BinMode::kStrict;
};

// Occurrence-variable decomposition: a cardinality constraint over the
// in-range values feeding per-bin occurrence sums.  Returns the fresh
// occurrence variables (one per distinct in-range domain value).
std::vector<VarId> post_bin_counts_decomposition(Solver& s, const BinCountsVars& v);

// Exact filter: count bounds and variable prunes from the assignment
// network (domains reach the network's own projection).
void post_bin_counts_gac(Solver& s, const BinCountsVars& v);

// Same fixpoints as the exact filter, but keeps per-(variable,bin)
// booleans on the trail so a run triggered by a single variable change
// can skip arcs that change cannot influence.
void post_bin_counts_gac_incremental(Solver& s, const BinCountsVars& v);

}  // namespace bincp
