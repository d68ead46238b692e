#include "bincp/models.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>
#include <tuple>

#include "bincp/constraints.hpp"

namespace bincp {

const char* to_string(PropagationMode mode) {
  switch (mode) {
    case PropagationMode::kDecomposition: return "dec";
    case PropagationMode::kGac: return "gac";
    case PropagationMode::kGacIncremental: return "gac-inc";
  }
  return "?";
}

std::optional<PropagationMode> propagation_mode_from(const std::string& name) {
  if (name == "dec" || name == "decomp" || name == "decomposition")
    return PropagationMode::kDecomposition;
  if (name == "gac") return PropagationMode::kGac;
  if (name == "gac-inc" || name == "gacinc" || name == "incremental")
    return PropagationMode::kGacIncremental;
  return std::nullopt;
}

void post_bin_counts(Solver& s, const BinCountsVars& v, PropagationMode mode) {
  switch (mode) {
    case PropagationMode::kDecomposition:
      post_bin_counts_decomposition(s, v);
      break;
    case PropagationMode::kGac:
      post_bin_counts_gac(s, v);
      break;
    case PropagationMode::kGacIncremental:
      post_bin_counts_gac_incremental(s, v);
      break;
  }
}

// ---------------------------------------------------------------------------
// Curriculum balancing.

namespace {

BinSpec bacp_bins(const BacpInstance& inst, const BacpConfig& cfg) {
  std::vector<int> bounds =
      cfg.load_bin_bounds.empty() ? std::vector<int>{0, 15, 20, 30, 35} : cfg.load_bin_bounds;
  bounds.push_back(inst.max_load + 1);
  return BinSpec::make(std::move(bounds));
}

double bacp_threshold(const BinSpec& bins, double alpha) {
  return chi2_inverse_cdf(bins.num_bins() - 1, 1.0 - alpha);
}

}  // namespace

BacpModel build_bacp(Solver& s, const BacpInstance& inst, const BacpConfig& cfg) {
  const int n = inst.num_courses();
  const int S = inst.semesters;

  BacpModel m;
  m.bins = bacp_bins(inst, cfg);
  const int nb = m.bins.num_bins();
  if ((int)cfg.targets.size() != nb)
    throw std::invalid_argument("curriculum: one histogram target per load bin expected");
  // Every semester lands in exactly one load bin, so the occupancy histogram
  // always sums to S; targets that do not are a modelling mistake.
  if (std::accumulate(cfg.targets.begin(), cfg.targets.end(), 0LL) != S)
    throw std::invalid_argument("curriculum: histogram targets must sum to the semester count");
  m.threshold = bacp_threshold(m.bins, cfg.alpha);

  for (int i = 0; i < n; ++i)
    m.semester_of.push_back(s.new_var(IntervalSet::interval(1, S), "s" + std::to_string(i + 1)));
  for (int j = 0; j < S; ++j)
    m.courses_in.push_back(s.new_var(IntervalSet::interval(inst.min_courses, inst.max_courses),
                                     "n" + std::to_string(j + 1)));
  for (int j = 0; j < S; ++j)
    m.load_of.push_back(s.new_var(IntervalSet::interval(inst.min_load, inst.max_load),
                                  "l" + std::to_string(j + 1)));
  for (int k = 0; k < nb; ++k)
    m.occupancy.push_back(s.new_var(IntervalSet::interval(0, S), "o" + std::to_string(k + 1)));

  std::vector<int> semesters(S);
  std::iota(semesters.begin(), semesters.end(), 1);
  post_gcc(s, m.semester_of, semesters, m.courses_in);

  std::vector<long long> weights(inst.credits.begin(), inst.credits.end());
  post_bin_packing(s, m.semester_of, weights, m.load_of);

  for (auto [a, b] : inst.prereqs) post_less(s, m.semester_of[a - 1], m.semester_of[b - 1]);

  post_bin_counts(s, {m.load_of, m.occupancy, m.bins, BinMode::kStrict}, cfg.mode);
  post_chi2_threshold(s, m.occupancy, cfg.targets, m.threshold);

  if (cfg.symmetry_breaking) {
    // Courses with equal credits and identical prerequisite neighbourhoods
    // are interchangeable; order each such class by id.
    std::vector<std::vector<int>> pred(n), succ(n);
    for (auto [a, b] : inst.prereqs) {
      pred[b - 1].push_back(a - 1);
      succ[a - 1].push_back(b - 1);
    }
    for (int i = 0; i < n; ++i) {
      std::sort(pred[i].begin(), pred[i].end());
      std::sort(succ[i].begin(), succ[i].end());
    }
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      return std::tie(inst.credits[a], pred[a], succ[a]) <
             std::tie(inst.credits[b], pred[b], succ[b]);
    });
    for (int k = 0; k + 1 < n; ++k) {
      int a = order[k], b = order[k + 1];
      if (inst.credits[a] != inst.credits[b] || pred[a] != pred[b] || succ[a] != succ[b])
        continue;
      if (a > b) std::swap(a, b);
      post_linear(s, {{1, m.semester_of[a]}, {-1, m.semester_of[b]}}, LinRel::kLe, 0);
    }
  }
  return m;
}

BacpCheck check_bacp_solution(const BacpInstance& inst, const BacpConfig& cfg,
                              const std::vector<int>& semester_of) {
  const int n = inst.num_courses();
  const int S = inst.semesters;
  BacpCheck out;
  if ((int)semester_of.size() != n) {
    out.reason = "wrong number of course assignments";
    return out;
  }
  std::vector<int> count(S, 0), load(S, 0);
  for (int i = 0; i < n; ++i) {
    int sem = semester_of[i];
    if (sem < 1 || sem > S) {
      out.reason = "course " + std::to_string(i + 1) + " outside semester range";
      return out;
    }
    ++count[sem - 1];
    load[sem - 1] += inst.credits[i];
  }
  out.loads = load;
  for (int j = 0; j < S; ++j) {
    if (count[j] < inst.min_courses || count[j] > inst.max_courses) {
      out.reason = "semester " + std::to_string(j + 1) + " course count out of range";
      return out;
    }
    if (load[j] < inst.min_load || load[j] > inst.max_load) {
      out.reason = "semester " + std::to_string(j + 1) + " load out of range";
      return out;
    }
  }
  for (auto [a, b] : inst.prereqs) {
    if (semester_of[a - 1] >= semester_of[b - 1]) {
      out.reason = "prerequisite " + std::to_string(a) + " before " + std::to_string(b) +
                   " violated";
      return out;
    }
  }
  BacpCheck rest = check_bacp_loads(inst, cfg, load);
  rest.loads = load;
  return rest;
}

BacpCheck check_bacp_loads(const BacpInstance& inst, const BacpConfig& cfg,
                           const std::vector<int>& loads) {
  BacpCheck out;
  out.loads = loads;
  if ((int)loads.size() != inst.semesters) {
    out.reason = "wrong number of semester loads";
    return out;
  }
  long long total = 0;
  for (int j = 0; j < inst.semesters; ++j) {
    if (loads[j] < inst.min_load || loads[j] > inst.max_load) {
      out.reason = "semester " + std::to_string(j + 1) + " load out of range";
      return out;
    }
    total += loads[j];
  }
  if (total != inst.total_credits()) {
    out.reason = "loads do not add up to the total credits";
    return out;
  }
  BinSpec bins = bacp_bins(inst, cfg);
  auto occ = bin_count(std::span<const int>(loads), bins, BinMode::kStrict);
  if (!occ) {
    out.reason = "load outside every histogram bin";
    return out;
  }
  out.occupancy = *occ;
  std::vector<long long> counts(occ->begin(), occ->end());
  RationalStat stat = pearson_statistic(counts, cfg.targets);
  out.statistic = stat.to_double();
  double threshold = bacp_threshold(bins, cfg.alpha);
  if (!stat.within(threshold)) {
    out.reason = "histogram statistic " + std::to_string(out.statistic) + " above threshold " +
                 std::to_string(threshold);
    return out;
  }
  out.ok = true;
  return out;
}

// ---------------------------------------------------------------------------
// Nurse workloads.

BnwpModel build_bnwp(Solver& s, const BnwpZone& zone, const BnwpConfig& cfg) {
  BnwpModel m;
  m.slots = zone.slots_per_nurse;
  m.nurses = zone.num_nurses();
  m.bins = BinSpec::make(cfg.acuity_bins);
  const int nb = m.bins.num_bins();
  if ((int)cfg.targets.size() != nb)
    throw std::invalid_argument("nurses: one histogram target per acuity bin expected");

  const int total_slots = m.nurses * m.slots;
  m.acuities = zone.acuities;
  m.acuities.resize(total_slots, 0);  // zero-acuity placeholders fill the roster
  for (int a : m.acuities)
    if (a < m.bins.bounds.front() || a >= m.bins.bounds.back())
      throw std::invalid_argument("nurses: acuity " + std::to_string(a) +
                                  " outside the histogram bins");

  for (int i = 0; i < total_slots; ++i)
    m.slot_patient.push_back(
        s.new_var(IntervalSet::interval(1, total_slots), "g" + std::to_string(i + 1)));
  post_all_different(s, m.slot_patient);

  IntervalSet acuity_values = IntervalSet::from_values(m.acuities);
  std::vector<VarId> slot_acuity;
  for (int i = 0; i < total_slots; ++i) {
    VarId a = s.new_var(acuity_values, "a" + std::to_string(i + 1));
    post_element(s, a, m.acuities, m.slot_patient[i]);
    slot_acuity.push_back(a);
  }

  m.scale = chi2_scale(cfg.targets);
  long long worst_ub = 0;
  for (long long t : cfg.targets) {
    long long coef = m.scale / t;
    long long at0 = t * t * coef;
    long long atS = (m.slots - t) * (m.slots - t) * coef;
    worst_ub += std::max(at0, atS);
  }
  if (worst_ub > std::numeric_limits<int>::max() / 2)
    throw std::invalid_argument("nurses: statistic scale overflows the objective domain");
  m.worst_scaled = s.new_var(IntervalSet::interval(0, (int)worst_ub), "worst");

  for (int nurse = 0; nurse < m.nurses; ++nurse) {
    std::vector<VarId> acuity_row(slot_acuity.begin() + nurse * m.slots,
                                  slot_acuity.begin() + (nurse + 1) * m.slots);
    std::vector<VarId> occ_row;
    for (int k = 0; k < nb; ++k)
      occ_row.push_back(s.new_var(IntervalSet::interval(0, m.slots),
                                  "o" + std::to_string(nurse + 1) + "_" + std::to_string(k + 1)));
    post_bin_counts(s, {acuity_row, occ_row, m.bins, BinMode::kStrict}, cfg.mode);
    post_scaled_chi2_le(s, occ_row, cfg.targets, m.worst_scaled);
    m.occupancy.insert(m.occupancy.end(), occ_row.begin(), occ_row.end());
  }

  if (cfg.symmetry_breaking) {
    // Slots of one nurse are unordered, and so are nurses themselves.
    for (int nurse = 0; nurse < m.nurses; ++nurse)
      for (int k = 0; k + 1 < m.slots; ++k)
        post_less(s, m.slot_patient[nurse * m.slots + k], m.slot_patient[nurse * m.slots + k + 1]);
    for (int nurse = 0; nurse + 1 < m.nurses; ++nurse)
      post_less(s, m.slot_patient[nurse * m.slots], m.slot_patient[(nurse + 1) * m.slots]);
  }
  return m;
}

BnwpCheck check_bnwp_solution(const BnwpZone& zone, const BnwpConfig& cfg,
                              const std::vector<int>& slot_patient) {
  BnwpCheck out;
  const int slots = zone.slots_per_nurse;
  const int nurses = zone.num_nurses();
  const int total = nurses * slots;
  if ((int)slot_patient.size() != total) {
    out.reason = "wrong number of slot assignments";
    return out;
  }
  std::vector<int> acuities = zone.acuities;
  acuities.resize(total, 0);
  std::vector<bool> used(total, false);
  for (int p : slot_patient) {
    if (p < 1 || p > total) {
      out.reason = "patient id out of range";
      return out;
    }
    if (used[p - 1]) {
      out.reason = "patient " + std::to_string(p) + " assigned twice";
      return out;
    }
    used[p - 1] = true;
  }

  BinSpec bins = BinSpec::make(cfg.acuity_bins);
  bool have_worst = false;
  for (int nurse = 0; nurse < nurses; ++nurse) {
    std::vector<int> row_acuity;
    for (int k = 0; k < slots; ++k)
      row_acuity.push_back(acuities[slot_patient[nurse * slots + k] - 1]);
    auto occ = bin_count(std::span<const int>(row_acuity), bins, BinMode::kStrict);
    if (!occ) {
      out.reason = "acuity outside every histogram bin";
      return out;
    }
    out.occupancy.push_back(*occ);
    std::vector<long long> counts(occ->begin(), occ->end());
    RationalStat stat = pearson_statistic(counts, cfg.targets);
    if (!have_worst || stat.num * out.worst_exact.den > out.worst_exact.num * stat.den) {
      out.worst_exact = stat;
      have_worst = true;
    }
  }
  out.worst_statistic = out.worst_exact.to_double();
  out.ok = true;
  return out;
}

std::vector<std::vector<int>> occupancy_multiset(const BnwpCheck& check) {
  auto rows = check.occupancy;
  std::sort(rows.begin(), rows.end());
  return rows;
}

// ---------------------------------------------------------------------------
// Randomized propagation study.

RandomInstance make_random_instance(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  RandomInstance inst;
  inst.bins = BinSpec::make({0, 5, 10, 15, 20, 25, 30, 35, 40, 45});
  for (int i = 0; i < 15; ++i) {
    std::vector<int> vals;
    for (int d = 0; d < 10; ++d) vals.push_back((int)(rng() % 60));
    inst.var_doms.push_back(IntervalSet::from_values(vals));
  }
  for (int j = 0; j < 9; ++j) inst.count_caps.push_back((int)(rng() % 16));
  return inst;
}

StudyRun run_study(std::uint64_t seed, double fraction, PropagationMode mode,
                   Branching branching, double time_limit_s) {
  RandomInstance inst = make_random_instance(seed);
  StudyRun run;
  run.seed = seed;
  run.fraction = fraction;
  run.mode = mode;

  Solver s;
  std::vector<VarId> xs, counts;
  for (size_t i = 0; i < inst.var_doms.size(); ++i)
    xs.push_back(s.new_var(inst.var_doms[i], "x" + std::to_string(i + 1)));
  for (size_t j = 0; j < inst.count_caps.size(); ++j)
    counts.push_back(
        s.new_var(IntervalSet::interval(0, inst.count_caps[j]), "c" + std::to_string(j + 1)));
  post_bin_counts(s, {xs, counts, inst.bins, BinMode::kStrict}, mode);

  if (!s.propagate()) {
    run.status = SearchStatus::kUnsat;
    run.nodes = 1;
    run.failures = 1;
    return run;
  }
  for (VarId v : xs) run.root_dom_sizes.push_back(s.dom_size(v));
  for (VarId v : counts) run.root_dom_sizes.push_back(s.dom_size(v));
  run.root_dom_total =
      std::accumulate(run.root_dom_sizes.begin(), run.root_dom_sizes.end(), 0LL);

  int goal_count = (int)(fraction * (double)xs.size() + 1e-9);
  std::vector<VarId> goal(xs.begin(), xs.begin() + goal_count);
  SearchStats stats;
  SearchResult res = s.solve(goal, branching, stats, time_limit_s);
  run.status = res.status;
  run.nodes = stats.nodes;
  run.failures = stats.failures;
  run.time_s = stats.time_s;
  return run;
}

// ---------------------------------------------------------------------------
// Confidence-threshold demo.

Chi2DemoModel build_chi2_demo(Solver& s, std::uint64_t seed, double alpha,
                              PropagationMode mode) {
  std::mt19937_64 rng(seed);
  Chi2DemoModel m;
  m.bins = BinSpec::make({0, 5, 10, 15, 20, 25, 30});
  m.targets = {2, 4, 10, 4, 2, 2};
  const int n = 24;
  for (int i = 0; i < n; ++i) {
    int cap = (int)(rng() % 30);
    m.values.push_back(s.new_var(IntervalSet::interval(0, cap), "v" + std::to_string(i + 1)));
  }
  for (int j = 0; j < m.bins.num_bins(); ++j)
    m.counts.push_back(s.new_var(IntervalSet::interval(0, n), "c" + std::to_string(j + 1)));
  m.threshold = chi2_inverse_cdf(m.bins.num_bins() - 1, 1.0 - alpha);
  post_bin_counts(s, {m.values, m.counts, m.bins, BinMode::kStrict}, mode);
  post_chi2_threshold(s, m.counts, m.targets, m.threshold);
  return m;
}

}  // namespace bincp
