#include <algorithm>
#include <atomic>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "bincp/bincounts.hpp"
#include "bincp/constraints.hpp"
#include "bincp/instances.hpp"
#include "bincp/models.hpp"
#include "bincp/report.hpp"
#include "bincp/solver.hpp"
#include "bincp/stats.hpp"

namespace {

using namespace bincp;

constexpr int kExitSat = 0;
constexpr int kExitUnsat = 1;
constexpr int kExitTimeout = 2;
constexpr int kExitInputError = 3;

int exit_code(SearchStatus status) {
  switch (status) {
    case SearchStatus::kSat: return kExitSat;
    case SearchStatus::kUnsat: return kExitUnsat;
    case SearchStatus::kTimeout: return kExitTimeout;
  }
  return kExitInputError;
}

PropagationMode parse_mode(const std::string& name) {
  auto mode = propagation_mode_from(name);
  if (!mode) throw std::invalid_argument("unknown propagation mode '" + name + "'");
  return *mode;
}

Branching parse_branching(const std::string& name) {
  if (name == "mindom") return Branching::kMinDomMinValue;
  if (name == "lex") return Branching::kLexMinValue;
  throw std::invalid_argument("unknown branching '" + name + "' (mindom, lex)");
}

// "7" or "3..12" inclusive.
std::pair<std::uint64_t, std::uint64_t> parse_seed_range(const std::string& text) {
  auto dots = text.find("..");
  try {
    if (dots == std::string::npos) {
      std::uint64_t s = std::stoull(text);
      return {s, s};
    }
    std::uint64_t a = std::stoull(text.substr(0, dots));
    std::uint64_t b = std::stoull(text.substr(dots + 2));
    if (b < a) throw std::invalid_argument("");
    return {a, b};
  } catch (const std::exception&) {
    throw std::invalid_argument("bad seed range '" + text + "' (expected A or A..B)");
  }
}

void write_out(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

int cmd_bincounts(const std::vector<int>& values, const std::vector<int>& bounds, bool hidden) {
  BinSpec bins = BinSpec::make(bounds);
  BinMode mode = hidden ? BinMode::kHiddenBin : BinMode::kStrict;
  auto counts = bin_count(values, bins, mode);
  if (!counts) {
    for (int v : values) {
      if (!bins.bin_of(v)) {
        std::cerr << "value " << v << " lies outside every bin [" << bins.bounds.front() << ","
                  << bins.bounds.back() << ")\n";
        break;
      }
    }
    return kExitInputError;
  }
  for (size_t j = 0; j < counts->size(); ++j)
    std::cout << (j ? " " : "") << (*counts)[j];
  std::cout << '\n';
  return kExitSat;
}

int cmd_compare(const std::string& seeds, double fraction, const std::vector<std::string>& modes,
                const std::string& branching, const std::string& format, const std::string& out,
                double time_limit, int jobs) {
  auto [lo, hi] = parse_seed_range(seeds);
  Branching b = parse_branching(branching);
  std::vector<std::pair<std::uint64_t, PropagationMode>> tasks;
  for (std::uint64_t seed = lo; seed <= hi; ++seed)
    for (const auto& mode : modes) tasks.emplace_back(seed, parse_mode(mode));

  // Each run owns its solver, so runs are independent; row order stays fixed
  // regardless of completion order.
  std::vector<StudyRun> runs(tasks.size());
  auto run_at = [&](size_t i) {
    runs[i] = run_study(tasks[i].first, fraction, tasks[i].second, b, time_limit);
  };
  size_t workers = std::min((size_t)std::max(jobs, 1), tasks.size());
  if (workers <= 1) {
    for (size_t i = 0; i < tasks.size(); ++i) run_at(i);
  } else {
    std::atomic<size_t> next{0};
    std::vector<std::thread> pool;
    for (size_t w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (size_t i = next++; i < tasks.size(); i = next++) run_at(i);
      });
    for (auto& t : pool) t.join();
  }

  std::ostringstream text;
  if (format == "json") {
    text << study_json(runs) << '\n';
  } else if (format == "csv") {
    text << study_csv_header() << '\n';
    for (const auto& run : runs) text << study_csv_row(run) << '\n';
  } else if (format == "table") {
    char line[160];
    std::snprintf(line, sizeof line, "%-8s %-5s %-8s %-8s %10s %10s %10s %9s\n", "seed", "frac",
                  "mode", "status", "rootdom", "nodes", "failures", "time_s");
    text << line;
    for (const auto& run : runs) {
      std::snprintf(line, sizeof line, "%-8llu %-5.2f %-8s %-8s %10lld %10lld %10lld %9.3f\n",
                    (unsigned long long)run.seed, run.fraction, to_string(run.mode),
                    to_string(run.status), run.root_dom_total, run.nodes, run.failures,
                    run.time_s);
      text << line;
    }
  } else {
    throw std::invalid_argument("unknown format '" + format + "' (table, csv, json)");
  }
  write_out(out, text.str());
  return kExitSat;
}

int cmd_bacp(const std::string& path, const std::string& mode_name, double alpha,
             const std::string& branching, double time_limit, bool as_json) {
  BacpInstance inst = load_bacp_file(path);
  BacpConfig cfg;
  cfg.alpha = alpha;
  cfg.mode = parse_mode(mode_name);
  cfg.branching = parse_branching(branching);

  Solver s;
  BacpModel model = build_bacp(s, inst, cfg);
  SearchStats stats;
  SearchResult res = s.solve(model.semester_of, cfg.branching, stats, time_limit);

  RunReport report;
  report.instance = path;
  report.mode = mode_name;
  report.status = to_string(res.status);
  report.nodes = stats.nodes;
  report.failures = stats.failures;
  report.time_s = stats.time_s;

  BacpCheck check;
  std::vector<int> assignment;
  if (res.solution) {
    for (VarId v : model.semester_of) assignment.push_back(res.solution->value(v));
    check = check_bacp_solution(inst, cfg, assignment);
    if (!check.ok) {
      std::cerr << "solver returned an invalid schedule: " << check.reason << '\n';
      return kExitUnsat;
    }
    report.solution = assignment;
    report.statistic = check.statistic;
  }

  if (as_json) {
    std::cout << to_json(report) << '\n';
  } else if (res.solution) {
    for (int j = 1; j <= inst.semesters; ++j) {
      std::cout << "semester " << j << " (load " << check.loads[j - 1] << "):";
      for (int i = 0; i < inst.num_courses(); ++i)
        if (assignment[i] == j) std::cout << ' ' << (i + 1);
      std::cout << '\n';
    }
    std::cout << "occupancy:";
    for (int o : check.occupancy) std::cout << ' ' << o;
    std::printf("\nstatistic: %.4f (threshold %.4f)\n", check.statistic, model.threshold);
    std::printf("nodes: %lld  failures: %lld  time: %.3fs\n", stats.nodes, stats.failures,
                stats.time_s);
  } else {
    std::cout << (res.status == SearchStatus::kTimeout ? "timeout\n" : "infeasible\n");
  }
  return exit_code(res.status);
}

int cmd_bnwp(const std::string& path, const std::string& mode_name, const std::string& branching,
             double time_limit, bool as_json) {
  BnwpZone zone = load_zone_file(path);
  BnwpConfig cfg;
  cfg.mode = parse_mode(mode_name);
  cfg.branching = parse_branching(branching);

  Solver s;
  BnwpModel model = build_bnwp(s, zone, cfg);
  SearchStats stats;
  SearchResult res = s.minimize(model.worst_scaled, model.slot_patient, cfg.branching, stats,
                                time_limit);

  RunReport report;
  report.instance = path;
  report.mode = mode_name;
  report.status = to_string(res.status);
  report.nodes = stats.nodes;
  report.failures = stats.failures;
  report.time_s = stats.time_s;

  BnwpCheck check;
  std::vector<int> assignment;
  if (res.solution) {
    for (VarId v : model.slot_patient) assignment.push_back(res.solution->value(v));
    check = check_bnwp_solution(zone, cfg, assignment);
    if (!check.ok) {
      std::cerr << "solver returned an invalid roster: " << check.reason << '\n';
      return kExitUnsat;
    }
    report.solution = assignment;
    report.objective = check.worst_statistic;
    report.statistic = check.worst_statistic;
    report.statistic_exact = check.worst_exact.to_string();
  }

  if (as_json) {
    std::cout << to_json(report) << '\n';
  } else if (res.solution) {
    for (int nurse = 0; nurse < model.nurses; ++nurse) {
      std::cout << "nurse " << (nurse + 1) << " patients:";
      for (int k = 0; k < model.slots; ++k)
        std::cout << ' ' << assignment[nurse * model.slots + k];
      std::cout << "  occupancy:";
      for (int o : check.occupancy[nurse]) std::cout << ' ' << o;
      std::cout << '\n';
    }
    std::printf("worst statistic: %.4f (%s)%s\n", check.worst_statistic,
                check.worst_exact.to_string().c_str(),
                res.status == SearchStatus::kTimeout ? " [not proven optimal]" : "");
    std::printf("nodes: %lld  failures: %lld  time: %.3fs\n", stats.nodes, stats.failures,
                stats.time_s);
  } else {
    std::cout << (res.status == SearchStatus::kTimeout ? "timeout\n" : "infeasible\n");
  }
  return exit_code(res.status);
}

int cmd_ci(std::vector<long long> counts, const std::vector<int>& observations,
           const std::vector<int>& bounds, double alpha) {
  if (!observations.empty()) {
    // Categories are 1..k unless --bins overrides; with --counts also given
    // the observations must recount to exactly those numbers.
    std::vector<int> unit;
    if (bounds.empty()) {
      if (counts.empty())
        throw std::invalid_argument("need --counts, or --observations with --bins");
      unit.resize(counts.size() + 1);
      std::iota(unit.begin(), unit.end(), 1);
    }
    BinSpec bins = BinSpec::make(bounds.empty() ? unit : bounds);
    auto counted = bin_count(observations, bins, BinMode::kStrict);
    if (!counted) throw std::invalid_argument("observation outside every bin");
    if (counts.empty())
      counts.assign(counted->begin(), counted->end());
    else if (!std::equal(counts.begin(), counts.end(), counted->begin(), counted->end()))
      throw std::invalid_argument("supplied counts do not match the observation histogram");
  }
  if (counts.empty())
    throw std::invalid_argument("need --counts, or --observations with --bins");
  auto intervals = simultaneous_intervals(counts, alpha);
  long long total = 0;
  for (long long c : counts) total += c;
  for (size_t k = 0; k < intervals.size(); ++k) {
    std::printf("category %zu: count %lld/%lld, p in [%.4f, %.4f]\n", k + 1, counts[k], total,
                intervals[k].first, intervals[k].second);
  }
  return kExitSat;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"constraint toolkit for histogram-shaped assignment problems"};
  app.require_subcommand(1);
  std::function<int()> action;

  // bincounts
  std::vector<int> bc_values, bc_bounds;
  bool bc_hidden = false;
  auto* bc = app.add_subcommand("bincounts", "count values into half-open bins");
  bc->add_option("--values", bc_values, "comma separated values")->required()->delimiter(',');
  bc->add_option("--bins", bc_bounds, "bin boundaries b1<b2<...")->required()->delimiter(',');
  bc->add_flag("--hidden", bc_hidden, "ignore values outside every bin instead of failing");
  bc->callback([&] { action = [&] { return cmd_bincounts(bc_values, bc_bounds, bc_hidden); }; });

  // compare
  std::string cp_seeds = "1..10", cp_branching = "lex", cp_format = "table", cp_out;
  double cp_fraction = 0.4, cp_tl = 60;
  int cp_jobs = 1;
  std::vector<std::string> cp_modes = {"dec", "gac", "gac-inc"};
  auto* cp = app.add_subcommand("compare", "run the propagation study on random instances");
  cp->add_option("--seeds", cp_seeds, "seed or inclusive range A..B");
  cp->add_option("--fraction", cp_fraction, "leading share of variables searched over")
      ->check(CLI::Range(0.0, 1.0));
  cp->add_option("--modes", cp_modes, "propagation modes to run")->delimiter(',');
  cp->add_option("--branching", cp_branching, "mindom or lex");
  cp->add_option("--format", cp_format, "table, csv or json");
  cp->add_option("--out", cp_out, "write output to a file");
  cp->add_option("--time-limit", cp_tl, "seconds per run");
  cp->add_option("--jobs", cp_jobs, "worker threads across runs")->check(CLI::PositiveNumber);
  cp->callback([&] {
    action = [&] {
      return cmd_compare(cp_seeds, cp_fraction, cp_modes, cp_branching, cp_format, cp_out, cp_tl,
                         cp_jobs);
    };
  });

  // bacp
  std::string ba_path, ba_mode = "gac", ba_branching = "mindom";
  double ba_alpha = 0.99, ba_tl = 60;
  bool ba_json = false;
  auto* ba = app.add_subcommand("bacp", "balance a curriculum across semesters");
  ba->add_option("--instance", ba_path, "instance file")->required();
  ba->add_option("--mode", ba_mode, "dec, gac or gac-inc");
  ba->add_option("--alpha", ba_alpha, "histogram confidence level")->check(CLI::Range(0.0, 1.0));
  ba->add_option("--branching", ba_branching, "mindom or lex");
  ba->add_option("--time-limit", ba_tl, "seconds");
  ba->add_flag("--json", ba_json, "emit a json report");
  ba->callback([&] {
    action = [&] { return cmd_bacp(ba_path, ba_mode, ba_alpha, ba_branching, ba_tl, ba_json); };
  });

  // bnwp
  std::string bn_path, bn_mode = "gac", bn_branching = "mindom";
  double bn_tl = 120;
  bool bn_json = false;
  auto* bn = app.add_subcommand("bnwp", "balance nurse workloads within a zone");
  bn->add_option("--zone", bn_path, "zone file")->required();
  bn->add_option("--mode", bn_mode, "dec, gac or gac-inc");
  bn->add_option("--branching", bn_branching, "mindom or lex");
  bn->add_option("--time-limit", bn_tl, "seconds");
  bn->add_flag("--json", bn_json, "emit a json report");
  bn->callback([&] {
    action = [&] { return cmd_bnwp(bn_path, bn_mode, bn_branching, bn_tl, bn_json); };
  });

  // ci
  std::vector<long long> ci_counts;
  std::vector<int> ci_obs, ci_bounds;
  double ci_alpha = 0.1;
  auto* ci = app.add_subcommand("ci", "simultaneous confidence intervals for category shares");
  ci->add_option("--counts", ci_counts, "category counts")->delimiter(',');
  ci->add_option("--observations", ci_obs, "raw values, counted via --bins")->delimiter(',');
  ci->add_option("--bins", ci_bounds, "bin boundaries for --observations")->delimiter(',');
  ci->add_option("--alpha", ci_alpha, "overall error rate")->check(CLI::Range(0.0, 1.0));
  ci->callback([&] { action = [&] { return cmd_ci(ci_counts, ci_obs, ci_bounds, ci_alpha); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitInputError;
  }

  try {
    return action();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInputError;
  }
}
