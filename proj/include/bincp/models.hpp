#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bincp/bincounts.hpp"
#include "bincp/instances.hpp"
#include "bincp/solver.hpp"
#include "bincp/stats.hpp"

namespace bincp {

enum class PropagationMode { kDecomposition, kGac, kGacIncremental };

const char* to_string(PropagationMode mode);
std::optional<PropagationMode> propagation_mode_from(const std::string& name);

// Posts one bin_counts constraint in the requested flavour.
void post_bin_counts(Solver& s, const BinCountsVars& v, PropagationMode mode);

// ---------------------------------------------------------------------------
// Curriculum balancing: spread course loads across semesters so the load
// histogram matches a target shape under a chi-squared threshold.

struct BacpConfig {
  // Interior bin bounds for semester loads; the final bound max_load+1 is
  // appended at build time. Empty means the default {0,15,20,30,35}.
  std::vector<int> load_bin_bounds;
  std::vector<long long> targets = {1, 2, 4, 2, 1};
  double alpha = 0.99;
  PropagationMode mode = PropagationMode::kGac;
  Branching branching = Branching::kMinDomMinValue;
  bool symmetry_breaking = true;
};

struct BacpModel {
  std::vector<VarId> semester_of;  // per course, 1..S
  std::vector<VarId> courses_in;   // per semester
  std::vector<VarId> load_of;      // per semester
  std::vector<VarId> occupancy;    // per load bin
  BinSpec bins;
  double threshold = 0;            // chi-squared acceptance bound
};

BacpModel build_bacp(Solver& s, const BacpInstance& inst, const BacpConfig& cfg);

struct BacpCheck {
  bool ok = false;
  std::string reason;
  std::vector<int> loads;      // per semester
  std::vector<int> occupancy;  // per bin
  double statistic = 0;
};

// Validates a full course->semester assignment against the instance rules
// without consulting the solver. semester_of is 1-based per course.
BacpCheck check_bacp_solution(const BacpInstance& inst, const BacpConfig& cfg,
                              const std::vector<int>& semester_of);

// Validates just a load vector: range, total credits, histogram statistic.
BacpCheck check_bacp_loads(const BacpInstance& inst, const BacpConfig& cfg,
                           const std::vector<int>& loads);

// ---------------------------------------------------------------------------
// Nurse workloads: partition patients into nurse slots so every nurse's
// acuity histogram stays close to a target shape; minimize the worst
// scaled chi-squared statistic.

struct BnwpConfig {
  std::vector<int> acuity_bins = {0, 30, 60, 100};
  std::vector<long long> targets = {2, 2, 2};
  PropagationMode mode = PropagationMode::kGac;
  Branching branching = Branching::kMinDomMinValue;
  bool symmetry_breaking = true;
};

struct BnwpModel {
  int nurses = 0;
  int slots = 0;                    // per nurse
  std::vector<int> acuities;        // padded with zero-acuity placeholders
  std::vector<VarId> slot_patient;  // nurses*slots, row-major
  std::vector<VarId> occupancy;     // nurses*m, row-major
  VarId worst_scaled = kNoVar;      // objective
  long long scale = 1;              // statistic = worst_scaled / scale
  BinSpec bins;
};

BnwpModel build_bnwp(Solver& s, const BnwpZone& zone, const BnwpConfig& cfg);

struct BnwpCheck {
  bool ok = false;
  std::string reason;
  std::vector<std::vector<int>> occupancy;  // per nurse
  double worst_statistic = 0;
  RationalStat worst_exact;
};

// Validates a full slot->patient assignment (row-major, 1-based patient ids
// over the padded roster) against the zone.
BnwpCheck check_bnwp_solution(const BnwpZone& zone, const BnwpConfig& cfg,
                              const std::vector<int>& slot_patient);

// Sorted per-nurse occupancy rows; order-independent solution fingerprint.
std::vector<std::vector<int>> occupancy_multiset(const BnwpCheck& check);

// ---------------------------------------------------------------------------
// Randomized propagation study. One instance has 15 variables over value
// range [0,60), 9 width-5 bins covering [0,45), and per-bin count caps.
//
// Sampling order for seed s, rng = mt19937_64(s):
//   for each of the 15 variables: 10 draws rng()%60 (duplicates collapse)
//   then for each of the 9 bins:  cap rng()%16, Dom(count) = {0..cap}
struct RandomInstance {
  std::vector<IntervalSet> var_doms;
  std::vector<int> count_caps;
  BinSpec bins;
};

RandomInstance make_random_instance(std::uint64_t seed);

struct StudyRun {
  std::uint64_t seed = 0;
  double fraction = 0;  // leading share of variables used as search goal
  PropagationMode mode = PropagationMode::kDecomposition;
  SearchStatus status = SearchStatus::kUnsat;
  std::vector<long long> root_dom_sizes;  // vars then counts; empty if root fails
  long long root_dom_total = 0;
  long long nodes = 0, failures = 0;
  double time_s = 0;
};

StudyRun run_study(std::uint64_t seed, double fraction, PropagationMode mode,
                   Branching branching, double time_limit_s);

// ---------------------------------------------------------------------------
// Confidence-threshold demo: random box domains, one bin_counts over six
// width-5 bins on [0,30), and a chi-squared acceptance test against the
// target histogram {2,4,10,4,2,2}.

struct Chi2DemoModel {
  std::vector<VarId> values;
  std::vector<VarId> counts;
  BinSpec bins;
  std::vector<long long> targets;
  double threshold = 0;
};

Chi2DemoModel build_chi2_demo(Solver& s, std::uint64_t seed, double alpha,
                              PropagationMode mode);

}  // namespace bincp
