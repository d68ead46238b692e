// End-to-end acceptance checks. Each criterion prints one PASS/FAIL line;
// the process exits nonzero if any fail. Kept free of test frameworks so
// the output reads as a plain checklist.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "bincp/bincounts.hpp"
#include "bincp/constraints.hpp"
#include "bincp/instances.hpp"
#include "bincp/models.hpp"
#include "bincp/solver.hpp"
#include "bincp/stats.hpp"
#include "oracle.hpp"

using namespace bincp;

#ifndef BINCP_DATA_DIR
#define BINCP_DATA_DIR "data"
#endif

namespace {

int criteria_failed = 0;
int criterion_index = 0;

void report(const std::string& name, bool ok, const std::string& detail = "") {
  ++criterion_index;
  std::printf("[%2d] %s  %s%s%s\n", criterion_index, ok ? "PASS" : "FAIL", name.c_str(),
              detail.empty() ? "" : " -- ", detail.c_str());
  if (!ok) ++criteria_failed;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// --------------------------------------------------------------------------
// Shared fixture: x1 in {3,4}, x2 in {1,2,4}, x3 in {2,3,4},
// bins [1,3) [3,5), c1 in {1,2,3}, c2 in {0,1}.

struct Example {
  Solver s;
  std::vector<VarId> xs;
  std::vector<VarId> counts;
};

void post_example(Example& e, PropagationMode mode) {
  e.xs = {e.s.new_var(IntervalSet::of({3, 4})), e.s.new_var(IntervalSet::of({1, 2, 4})),
          e.s.new_var(IntervalSet::of({2, 3, 4}))};
  e.counts = {e.s.new_var(IntervalSet::interval(1, 3)), e.s.new_var(IntervalSet::interval(0, 1))};
  post_bin_counts(e.s, {e.xs, e.counts, BinSpec::make({1, 3, 5}), BinMode::kStrict}, mode);
}

// --------------------------------------------------------------------------
// Random small instances for the projection comparison.

struct SmallInstance {
  std::vector<IntervalSet> xs_doms;
  std::vector<IntervalSet> count_doms;
  BinSpec bins;
  BinMode mode;
};

SmallInstance random_small(std::mt19937_64& rng) {
  SmallInstance inst{{}, {}, BinSpec::make({0, 1}), BinMode::kStrict};
  int n = 1 + (int)(rng() % 6);
  int m = 1 + (int)(rng() % 4);
  std::vector<int> bounds = {(int)(rng() % 3)};
  for (int j = 0; j < m; ++j) bounds.push_back(bounds.back() + 1 + (int)(rng() % 3));
  inst.bins = BinSpec::make(bounds);
  for (int i = 0; i < n; ++i)
    inst.xs_doms.push_back(oracle::random_domain(rng, bounds.front() - 2, bounds.back() + 1, 5));
  for (int j = 0; j < m; ++j) inst.count_doms.push_back(oracle::random_domain(rng, 0, n, 5));
  inst.mode = rng() % 3 == 0 ? BinMode::kHiddenBin : BinMode::kStrict;
  return inst;
}

// Flow-filter fixpoint == per-variable solution projections for `rounds`
// seeded instances. Returns a failure description, empty on success.
std::string projection_sweep(std::uint64_t base_seed, int rounds) {
  for (int round = 0; round < rounds; ++round) {
    std::mt19937_64 rng(base_seed + (std::uint64_t)round);
    SmallInstance inst = random_small(rng);
    auto projected =
        oracle::project_bin_counts(inst.xs_doms, inst.count_doms, inst.bins, inst.mode);
    bool has_solution = !projected.empty() && !projected[0].empty();

    Solver s;
    std::vector<VarId> xs, counts;
    for (const auto& d : inst.xs_doms) xs.push_back(s.new_var(d));
    for (const auto& d : inst.count_doms) counts.push_back(s.new_var(d));
    post_bin_counts(s, {xs, counts, inst.bins, inst.mode}, PropagationMode::kGac);
    bool ok = s.propagate();

    if (ok != has_solution)
      return "instance " + std::to_string(round) + ": feasibility disagrees";
    if (!ok) continue;
    std::vector<VarId> all = xs;
    all.insert(all.end(), counts.begin(), counts.end());
    for (size_t i = 0; i < all.size(); ++i)
      if (!(s.dom(all[i]) == projected[i]))
        return "instance " + std::to_string(round) + " var " + std::to_string(i) + ": " +
               s.dom(all[i]).to_string() + " vs " + projected[i].to_string();
  }
  return "";
}

// Lockstep replay of random decisions on the recomputing and incremental
// filters; every propagated state must agree. Returns states compared,
// negative on mismatch.
long long equivalence_replay(std::uint64_t base_seed, long long min_states) {
  std::mt19937_64 rng(base_seed);
  long long states = 0;
  for (int round = 0; states < min_states && round < 200; ++round) {
    RandomInstance inst = make_random_instance(base_seed + (std::uint64_t)round);
    Solver a, b;
    std::vector<VarId> va, vb;
    auto build = [&](PropagationMode mode, Solver& s, std::vector<VarId>& all) {
      std::vector<VarId> xs, counts;
      for (const auto& d : inst.var_doms) xs.push_back(s.new_var(d));
      for (int cap : inst.count_caps) counts.push_back(s.new_var(IntervalSet::interval(0, cap)));
      post_bin_counts(s, {xs, counts, inst.bins, BinMode::kStrict}, mode);
      all = xs;
      all.insert(all.end(), counts.begin(), counts.end());
    };
    build(PropagationMode::kGac, a, va);
    build(PropagationMode::kGacIncremental, b, vb);
    bool ra = a.propagate(), rb = b.propagate();
    if (ra != rb) return -1;
    ++states;
    if (!ra) continue;
    for (size_t i = 0; i < va.size(); ++i)
      if (!(a.dom(va[i]) == b.dom(vb[i]))) return -1;

    for (int step = 0; step < 80; ++step) {
      std::vector<VarId> open;
      for (VarId v : va)
        if (!a.fixed(v)) open.push_back(v);
      if (open.empty()) break;
      VarId v = open[rng() % open.size()];
      auto vals = a.dom(v).values();
      int val = vals[rng() % vals.size()];
      bool do_assign = rng() % 2 == 0;

      int da = a.push_level();
      int db = b.push_level();
      bool oka = do_assign ? a.assign(v, val) : a.remove_value(v, val);
      bool okb = do_assign ? b.assign(v, val) : b.remove_value(v, val);
      if (oka != okb) return -1;
      if (oka) {
        oka = a.propagate();
        okb = b.propagate();
        if (oka != okb) return -1;
      }
      ++states;
      if (!oka) {
        a.backtrack_to(da);
        b.backtrack_to(db);
        continue;
      }
      for (size_t i = 0; i < va.size(); ++i)
        if (!(a.dom(va[i]) == b.dom(vb[i]))) return -1;
    }
  }
  return states;
}

}  // namespace

int main() {
  // 1: plain counting on the worked example, well under a millisecond.
  {
    std::vector<int> values = {1, 1, 5, 3, 1, 2, 1, 1, 3, 1};
    BinSpec bins = BinSpec::make({1, 3, 4, 6});
    std::vector<double> times;
    bool correct = true;
    for (int rep = 0; rep < 200; ++rep) {
      auto t0 = std::chrono::steady_clock::now();
      auto counts = bin_count(values, bins, BinMode::kStrict);
      times.push_back(seconds_since(t0) * 1e3);
      correct = correct && counts && *counts == std::vector<int>{7, 2, 1};
    }
    std::sort(times.begin(), times.end());
    double median_ms = times[times.size() / 2];
    char detail[64];
    std::snprintf(detail, sizeof detail, "counts 7 2 1, median %.4f ms", median_ms);
    report("histogram counting on the worked example stays under 1 ms",
           correct && median_ms < 1.0, detail);
  }

  // 2: decomposition fixpoint on the worked example.
  {
    Example e;
    post_example(e, PropagationMode::kDecomposition);
    bool ok = e.s.propagate();
    ok = ok && e.s.dom(e.xs[0]) == IntervalSet::of({3, 4});
    ok = ok && e.s.dom(e.xs[1]) == IntervalSet::of({1, 2, 4});
    ok = ok && e.s.dom(e.xs[2]) == IntervalSet::of({2, 3, 4});
    ok = ok && e.s.dom(e.counts[0]) == IntervalSet::of({2, 3});
    ok = ok && e.s.dom(e.counts[1]) == IntervalSet::of({0, 1});
    report("decomposition fixpoint on the worked example", ok);
  }

  // 3: flow-filter fixpoint on the worked example.
  {
    bool ok = true;
    for (PropagationMode mode : {PropagationMode::kGac, PropagationMode::kGacIncremental}) {
      Example e;
      post_example(e, mode);
      ok = ok && e.s.propagate();
      ok = ok && e.s.dom(e.xs[0]) == IntervalSet::of({3, 4});
      ok = ok && e.s.dom(e.xs[1]) == IntervalSet::of({1, 2});
      ok = ok && e.s.dom(e.xs[2]) == IntervalSet::of({2});
      ok = ok && e.s.dom(e.counts[0]) == IntervalSet::of({2});
      ok = ok && e.s.dom(e.counts[1]) == IntervalSet::of({1});
    }
    report("flow filter fixpoint on the worked example", ok);
  }

  // 4: flow filter == solution projections on 200 seeded instances.
  {
    auto t0 = std::chrono::steady_clock::now();
    std::string failure = projection_sweep(1, 200);
    double elapsed = seconds_since(t0);
    char detail[96];
    std::snprintf(detail, sizeof detail, "200 instances in %.1f s%s%s", elapsed,
                  failure.empty() ? "" : "; ", failure.c_str());
    report("flow filter equals exhaustive solution projections",
           failure.empty() && elapsed < 60.0, detail);
  }

  // 5: incremental filter == recomputing filter on 500+ search states.
  {
    long long states = equivalence_replay(100, 500);
    char detail[64];
    std::snprintf(detail, sizeof detail, "%lld states compared", states);
    report("incremental filter matches the recomputing filter under replay", states >= 500,
           detail);
  }

  // 6: across the randomized study, the flow filter never keeps a larger
  // domain than the decomposition and never searches more nodes.
  {
    bool ok = true;
    std::string failure;
    int runs = 0;
    for (std::uint64_t seed = 1; seed <= 50 && ok; ++seed) {
      for (double fraction : {0.0, 0.2, 0.4, 0.6, 0.8}) {
        StudyRun dec = run_study(seed, fraction, PropagationMode::kDecomposition,
                                 Branching::kLexMinValue, 60.0);
        StudyRun gac =
            run_study(seed, fraction, PropagationMode::kGac, Branching::kLexMinValue, 60.0);
        ++runs;
        auto where = [&] {
          return "seed " + std::to_string(seed) + " fraction " + std::to_string(fraction);
        };
        if (dec.status == SearchStatus::kTimeout || gac.status == SearchStatus::kTimeout) {
          ok = false;
          failure = where() + ": timeout";
          break;
        }
        if (dec.root_dom_sizes.empty() && !gac.root_dom_sizes.empty()) {
          ok = false;
          failure = where() + ": decomposition failed at the root, flow filter did not";
          break;
        }
        if (!dec.root_dom_sizes.empty() && !gac.root_dom_sizes.empty()) {
          for (size_t i = 0; i < gac.root_dom_sizes.size(); ++i) {
            if (gac.root_dom_sizes[i] > dec.root_dom_sizes[i]) {
              ok = false;
              failure = where() + ": larger domain at var " + std::to_string(i);
              break;
            }
          }
        }
        if (ok && gac.nodes > dec.nodes) {
          ok = false;
          failure = where() + ": " + std::to_string(gac.nodes) + " > " +
                    std::to_string(dec.nodes) + " nodes";
        }
        if (!ok) break;
      }
    }
    char detail[160];
    std::snprintf(detail, sizeof detail, "%d runs%s%s", runs, failure.empty() ? "" : "; ",
                  failure.c_str());
    report("flow filter dominates the decomposition across the study", ok, detail);
  }

  // 7: chi-square quantiles.
  {
    bool ok = std::abs(chi2_inverse_cdf(2, 0.9) - 4.605170185988091) < 1e-6;
    ok = ok && std::abs(chi2_inverse_cdf(5, 0.05) - 1.1455) < 5e-4;
    ok = ok && std::abs(chi2_inverse_cdf(5, 0.01) - 0.5543) < 5e-4;
    ok = ok && std::abs(chi2_inverse_cdf(4, 0.01) - 0.29711) < 5e-5;
    for (int df : {1, 2, 3, 4, 5, 7, 10, 20, 50}) {
      for (double q : {0.001, 0.01, 0.05, 0.25, 0.5, 0.75, 0.95, 0.99, 0.999}) {
        double x = chi2_inverse_cdf(df, q);
        ok = ok && std::abs(chi2_cdf(df, x) - q) <= 1e-10;
      }
    }
    report("chi-square quantiles and round trip", ok);
  }

  // 8: simultaneous confidence intervals for the worked sample (3,5,2).
  {
    auto intervals = simultaneous_intervals(std::vector<long long>{3, 5, 2}, 0.1);
    const double expect[3][2] = {{0.0981, 0.6280}, {0.2192, 0.7808}, {0.0509, 0.5383}};
    bool ok = intervals.size() == 3;
    for (int k = 0; ok && k < 3; ++k) {
      ok = std::abs(intervals[k].first - expect[k][0]) < 5e-4 &&
           std::abs(intervals[k].second - expect[k][1]) < 5e-4;
    }
    report("confidence intervals for the worked sample", ok);
  }

  // 9: nurse zone solved to the known optimum within 120 s.
  {
    auto t0 = std::chrono::steady_clock::now();
    BnwpZone zone = load_zone_file(std::string(BINCP_DATA_DIR) + "/2zones0-zone1.txt");
    BnwpConfig cfg;
    cfg.mode = PropagationMode::kGac;
    Solver s;
    BnwpModel model = build_bnwp(s, zone, cfg);
    SearchStats stats;
    SearchResult res =
        s.minimize(model.worst_scaled, model.slot_patient, cfg.branching, stats, 115.0);
    double elapsed = seconds_since(t0);

    bool ok = res.status == SearchStatus::kSat && elapsed < 120.0;
    std::string detail;
    if (ok) {
      std::vector<int> assignment;
      for (VarId v : model.slot_patient) assignment.push_back(res.solution->value(v));
      BnwpCheck check = check_bnwp_solution(zone, cfg, assignment);
      ok = check.ok && check.worst_exact == RationalStat{4, 1};
      auto rows = occupancy_multiset(check);
      std::vector<std::vector<int>> expect = {{2, 4, 0}, {2, 4, 0}, {3, 3, 0}};
      ok = ok && rows == expect;
      char buf[96];
      std::snprintf(buf, sizeof buf, "worst statistic %s in %.1f s",
                    check.worst_exact.to_string().c_str(), elapsed);
      detail = buf;
    } else {
      detail = "no optimum within the budget";
    }
    report("nurse zone reaches the known optimum within 120 s", ok, detail);
  }

  // 10: curriculum instance solved with a perfectly balanced histogram, and
  // the reference load vector passes the independent checker.
  {
    auto t0 = std::chrono::steady_clock::now();
    BacpInstance inst = load_bacp_file(std::string(BINCP_DATA_DIR) + "/bacp-1.txt");
    BacpConfig cfg;
    Solver s;
    BacpModel model = build_bacp(s, inst, cfg);
    SearchStats stats;
    SearchResult res = s.solve(model.semester_of, cfg.branching, stats, 55.0);
    double elapsed = seconds_since(t0);

    bool ok = res.status == SearchStatus::kSat && elapsed < 60.0;
    std::string detail = "no schedule within the budget";
    if (ok) {
      std::vector<int> assignment;
      for (VarId v : model.semester_of) assignment.push_back(res.solution->value(v));
      BacpCheck check = check_bacp_solution(inst, cfg, assignment);
      ok = check.ok && check.statistic == 0.0;
      char buf[96];
      std::snprintf(buf, sizeof buf, "statistic %.4f in %.3f s", check.statistic, elapsed);
      detail = buf;
    }
    BacpCheck reference =
        check_bacp_loads(inst, cfg, {50, 34, 29, 17, 7, 33, 23, 29, 24, 17});
    ok = ok && reference.ok && reference.statistic == 0.0 &&
         reference.occupancy == std::vector<int>{1, 2, 4, 2, 1};
    report("curriculum instance solves with a balanced histogram within 60 s", ok, detail);
  }

  // 11: property sweeps again under fresh seeds.
  {
    std::string projection_failure = projection_sweep(5000, 60);
    long long states = equivalence_replay(9000, 200);
    bool intervals_ok = true;
    for (long long n : {6, 25, 120}) {
      for (long long c = 0; c <= n; c += std::max<long long>(1, n / 5)) {
        auto [lo, hi] = qh_interval(n, c, 5, 0.07);
        double phat = (double)c / (double)n;
        intervals_ok = intervals_ok && lo >= 0.0 && hi <= 1.0 && lo <= phat + 1e-12 &&
                       hi >= phat - 1e-12;
      }
    }
    bool ok = projection_failure.empty() && states >= 200 && intervals_ok;
    char detail[128];
    std::snprintf(detail, sizeof detail, "60 projections, %lld replay states%s%s", states,
                  projection_failure.empty() ? "" : "; ", projection_failure.c_str());
    report("property sweeps hold under fresh seeds", ok, detail);
  }

  std::printf("%d/%d criteria passed\n", criterion_index - criteria_failed, criterion_index);
  return criteria_failed == 0 ? 0 : 1;
}
