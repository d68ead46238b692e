#pragma once

#include <span>
#include <vector>

#include "bincp/solver.hpp"

namespace bincp {

struct LinTerm {
  long long coef;
  VarId var;
};

enum class LinRel { kEq, kLe, kLt, kGe };

// Sum(coef_i * var_i) REL rhs, bounds propagation.
void post_linear(Solver& s, std::vector<LinTerm> terms, LinRel rel, long long rhs);

// x < y convenience.
void post_less(Solver& s, VarId x, VarId y);

// All variables take pairwise distinct values. `matching` selects the
// matching-based filter (detects Hall sets); otherwise a pairwise
// decomposition that only reacts to fixed variables is used.
void post_all_different(Solver& s, std::vector<VarId> vars, bool matching = true);

// result = table[index], 1-based index, domain-consistent.
void post_element(Solver& s, VarId result, std::vector<int> table, VarId index);

// counts[k] = |{i : vars[i] = values[k]}| for distinct values; counting
// filter on bounds. Posts a redundant total-count sum when `values`
// covers every variable domain.
void post_gcc(Solver& s, std::vector<VarId> vars, std::vector<int> values,
              std::vector<VarId> counts);

// Item i with weight[i] goes to bin bin_of[i] (values 1..loads.size());
// loads[j] = total weight in bin j. Committed/possible-sum filtering plus
// the redundant total Sum(loads) = Sum(weights).
void post_bin_packing(Solver& s, std::vector<VarId> bin_of, std::vector<long long> weights,
                      std::vector<VarId> loads);

// Sum_k (counts[k]-targets[k])^2 / targets[k] <= threshold.
// Exact integer arithmetic over a common denominator; the threshold is
// compared with an absolute margin of 1e-12 in its favour.
void post_chi2_threshold(Solver& s, std::vector<VarId> counts, std::vector<long long> targets,
                         double threshold);

// lcm(targets) * Sum_k (counts[k]-targets[k])^2 / targets[k] <= bound.
// The left side is integral, so `bound` can be a plain variable; used to
// minimize the worst statistic across several groups sharing `bound`.
void post_scaled_chi2_le(Solver& s, std::vector<VarId> counts, std::vector<long long> targets,
                         VarId bound);

// Scale factor used by post_scaled_chi2_le: lcm of the targets.
long long chi2_scale(std::span<const long long> targets);

}  // namespace bincp
