#include <random>
#include <set>

#include "bincp/constraints.hpp"
#include "bincp/intervalset.hpp"
#include "bincp/solver.hpp"
#include "doctest.h"
#include "oracle.hpp"

using namespace bincp;

TEST_CASE("interval set basics") {
  IntervalSet s = IntervalSet::of({1, 2, 4, 7, 8, 9});
  CHECK(s.size() == 6);
  CHECK(s.min() == 1);
  CHECK(s.max() == 9);
  CHECK(s.contains(4));
  CHECK(!s.contains(5));
  CHECK(s.to_string() == "{1..2,4,7..9}");
  CHECK(s.next_ge(3, -1) == 4);
  CHECK(s.next_ge(10, -1) == -1);
  CHECK(s.prev_le(6, -1) == 4);
  CHECK(s.prev_le(0, -1) == -1);
  CHECK(s.count_in(2, 7) == 3);
  CHECK(s.intersect(2, 8) == IntervalSet::of({2, 4, 7, 8}));
  CHECK(IntervalSet::interval(3, 2).empty());
  CHECK(IntervalSet::from_values(std::vector<int>{5, 3, 5, 4}) == IntervalSet::interval(3, 5));
}

TEST_CASE("interval set erase and restore against a reference set") {
  std::mt19937_64 rng(7);
  for (int round = 0; round < 300; ++round) {
    IntervalSet s = oracle::random_domain(rng, -25, 25, 18);
    std::set<int> ref;
    for (int v : s.values()) ref.insert(v);
    IntervalSet original = s;

    std::vector<IntervalSet> undo;
    for (int op = 0; op < 6; ++op) {
      int lo = -27 + (int)(rng() % 55);
      int hi = lo + (int)(rng() % 8);
      IntervalSet removed = s.erase_range(lo, hi);
      long long expect_removed = 0;
      for (int v = lo; v <= hi; ++v) expect_removed += ref.erase(v);
      CHECK(removed.size() == expect_removed);
      CHECK((long long)ref.size() == s.size());
      for (int v : removed.values()) CHECK(v >= lo);
      undo.push_back(std::move(removed));
      if (s.empty()) break;
    }
    for (int v : s.values()) CHECK(ref.count(v) == 1);

    for (auto it = undo.rbegin(); it != undo.rend(); ++it) s.insert_disjoint(*it);
    CHECK(s == original);
  }
}

TEST_CASE("backtracking restores domains and stored booleans bit-exactly") {
  std::mt19937_64 rng(11);
  for (int round = 0; round < 120; ++round) {
    Solver s;
    std::vector<VarId> vars;
    for (int i = 0; i < 6; ++i) vars.push_back(s.new_var(oracle::random_domain(rng, -10, 10, 12)));
    std::vector<BoolId> bools;
    for (int i = 0; i < 4; ++i) bools.push_back(s.new_stored_bool(rng() % 2 == 0));

    auto snapshot = [&] {
      std::vector<IntervalSet> doms;
      for (VarId v : vars) doms.push_back(s.dom(v));
      std::vector<bool> bs;
      for (BoolId b : bools) bs.push_back(s.bool_value(b));
      return std::make_pair(doms, bs);
    };

    std::vector<std::pair<std::vector<IntervalSet>, std::vector<bool>>> levels;
    levels.push_back(snapshot());
    for (int depth = 0; depth < 5; ++depth) {
      s.push_level();
      for (int op = 0; op < 3; ++op) {
        VarId v = vars[rng() % vars.size()];
        if (s.dom_size(v) <= 1) continue;
        int val = s.dom(v).values()[rng() % s.dom_size(v)];
        switch (rng() % 4) {
          case 0:
            if (s.dom_size(v) > 1) s.remove_value(v, val);
            break;
          case 1:
            if (s.max(v) > val) s.set_min(v, val + (s.min(v) < val ? 0 : 1));
            break;
          case 2:
            if (s.min(v) < val) s.set_max(v, val);
            break;
          default:
            s.remove_range(v, val, val + 2);
            break;
        }
        if (s.failed()) break;
      }
      s.set_bool(bools[rng() % bools.size()], rng() % 2 == 0);
      if (s.failed()) break;
      levels.push_back(snapshot());
    }

    int target = (int)(rng() % levels.size());
    s.backtrack_to(target);
    auto [doms, bs] = snapshot();
    CHECK(doms == levels[target].first);
    CHECK(bs == levels[target].second);
    s.backtrack_to(0);
    auto [doms0, bs0] = snapshot();
    CHECK(doms0 == levels[0].first);
    CHECK(bs0 == levels[0].second);
  }
}

namespace {

struct RandomCsp {
  std::vector<IntervalSet> doms;
  std::vector<std::vector<LinTerm>> sums;  // each: sum terms <= rhs
  std::vector<long long> rhs;
  bool with_all_different = false;

  bool satisfied(const std::vector<int>& a) const {
    for (size_t c = 0; c < sums.size(); ++c) {
      long long total = 0;
      for (const LinTerm& t : sums[c]) total += t.coef * a[t.var];
      if (total > rhs[c]) return false;
    }
    if (with_all_different) {
      for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = i + 1; j < a.size(); ++j)
          if (a[i] == a[j]) return false;
    }
    return true;
  }
};

RandomCsp make_csp(std::mt19937_64& rng) {
  RandomCsp csp;
  for (int i = 0; i < 4; ++i) csp.doms.push_back(oracle::random_domain(rng, 0, 5, 4));
  for (int c = 0; c < 2; ++c) {
    std::vector<LinTerm> terms;
    for (int i = 0; i < 4; ++i) {
      long long coef = (long long)(rng() % 5) - 2;
      if (coef != 0) terms.push_back({coef, i});
    }
    if (terms.empty()) terms.push_back({1, 0});
    csp.sums.push_back(terms);
    csp.rhs.push_back((long long)(rng() % 21) - 6);
  }
  csp.with_all_different = rng() % 2 == 0;
  return csp;
}

}  // namespace

TEST_CASE("first-solution search agrees with exhaustive enumeration") {
  std::mt19937_64 rng(23);
  int sat_seen = 0, unsat_seen = 0;
  for (int round = 0; round < 150; ++round) {
    RandomCsp csp = make_csp(rng);

    bool exists = false;
    oracle::enumerate(csp.doms, [&](const std::vector<int>& a) {
      if (csp.satisfied(a)) exists = true;
    });

    Solver s;
    std::vector<VarId> vars;
    for (const auto& d : csp.doms) vars.push_back(s.new_var(d));
    for (size_t c = 0; c < csp.sums.size(); ++c)
      post_linear(s, csp.sums[c], LinRel::kLe, csp.rhs[c]);
    if (csp.with_all_different) post_all_different(s, vars);

    SearchStats stats;
    Branching b = round % 2 == 0 ? Branching::kMinDomMinValue : Branching::kLexMinValue;
    SearchResult res = s.solve(vars, b, stats);
    REQUIRE(res.status != SearchStatus::kTimeout);
    CHECK((res.status == SearchStatus::kSat) == exists);
    CHECK(stats.nodes >= stats.failures);
    if (res.status == SearchStatus::kSat) {
      ++sat_seen;
      REQUIRE(res.solution.has_value());
      std::vector<int> a;
      for (VarId v : vars) {
        REQUIRE(res.solution->fixed(v));
        a.push_back(res.solution->value(v));
      }
      CHECK(csp.satisfied(a));
    } else {
      ++unsat_seen;
    }
  }
  // The generator must exercise both outcomes or the test proves little.
  CHECK(sat_seen > 20);
  CHECK(unsat_seen > 20);
}

TEST_CASE("branch and bound reaches the optimum") {
  std::mt19937_64 rng(31);
  for (int round = 0; round < 120; ++round) {
    RandomCsp csp = make_csp(rng);

    long long best = std::numeric_limits<long long>::max();
    oracle::enumerate(csp.doms, [&](const std::vector<int>& a) {
      if (!csp.satisfied(a)) return;
      long long obj = a[0] + 2LL * a[1] - a[2];
      best = std::min(best, obj);
    });

    Solver s;
    std::vector<VarId> vars;
    for (const auto& d : csp.doms) vars.push_back(s.new_var(d));
    for (size_t c = 0; c < csp.sums.size(); ++c)
      post_linear(s, csp.sums[c], LinRel::kLe, csp.rhs[c]);
    if (csp.with_all_different) post_all_different(s, vars);
    VarId obj = s.new_var(IntervalSet::interval(-40, 40));
    post_linear(s, {{1, vars[0]}, {2, vars[1]}, {-1, vars[2]}, {-1, obj}}, LinRel::kEq, 0);

    SearchStats stats;
    SearchResult res = s.minimize(obj, vars, Branching::kMinDomMinValue, stats);
    REQUIRE(res.status != SearchStatus::kTimeout);
    if (best == std::numeric_limits<long long>::max()) {
      CHECK(res.status == SearchStatus::kUnsat);
    } else {
      REQUIRE(res.status == SearchStatus::kSat);
      REQUIRE(res.solution.has_value());
      CHECK(res.solution->value(obj) == best);
    }
  }
}

TEST_CASE("solve counts the root as one node") {
  Solver s;
  VarId x = s.new_var(IntervalSet::of({3}));
  SearchStats stats;
  SearchResult res = s.solve(std::vector<VarId>{x}, Branching::kLexMinValue, stats);
  CHECK(res.status == SearchStatus::kSat);
  CHECK(stats.nodes == 1);
  CHECK(stats.failures == 0);
}

TEST_CASE("propagation queue reaches a fixpoint across propagators") {
  // x < y < z with tight domains forces a unique assignment.
  Solver s;
  VarId x = s.new_var(IntervalSet::interval(1, 3));
  VarId y = s.new_var(IntervalSet::interval(1, 3));
  VarId z = s.new_var(IntervalSet::interval(1, 3));
  post_less(s, x, y);
  post_less(s, y, z);
  REQUIRE(s.propagate());
  CHECK(s.value(x) == 1);
  CHECK(s.value(y) == 2);
  CHECK(s.value(z) == 3);
}
