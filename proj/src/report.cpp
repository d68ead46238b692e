#include "bincp/report.hpp"

#include <cmath>
#include <sstream>

#include "json.hpp"

namespace bincp {
namespace {

using nlohmann::json;

// Statistics carry four decimals, wall times three.
double round_to(double x, int decimals) {
  double f = std::pow(10.0, decimals);
  return std::round(x * f) / f;
}

json base_json(const StudyRun& run) {
  json j;
  j["seed"] = run.seed;
  j["fraction"] = run.fraction;
  j["mode"] = to_string(run.mode);
  j["status"] = to_string(run.status);
  j["root_domain_total"] = run.root_dom_total;
  j["root_domain_sizes"] = run.root_dom_sizes;
  j["nodes"] = run.nodes;
  j["failures"] = run.failures;
  j["time_s"] = round_to(run.time_s, 3);
  return j;
}

}  // namespace

const char* to_string(SearchStatus status) {
  switch (status) {
    case SearchStatus::kSat: return "sat";
    case SearchStatus::kUnsat: return "unsat";
    case SearchStatus::kTimeout: return "timeout";
  }
  return "?";
}

std::string to_json(const RunReport& report) {
  json j;
  j["instance"] = report.instance;
  j["mode"] = report.mode;
  j["status"] = report.status;
  j["nodes"] = report.nodes;
  j["failures"] = report.failures;
  j["time_s"] = round_to(report.time_s, 3);
  if (report.solution) j["solution"] = *report.solution;
  if (report.statistic) j["statistic"] = round_to(*report.statistic, 4);
  if (report.statistic_exact) j["statistic_exact"] = *report.statistic_exact;
  if (report.objective) j["objective"] = round_to(*report.objective, 4);
  return j.dump(2);
}

std::string study_csv_header() {
  return "seed,fraction,mode,status,root_domain_total,nodes,failures,time_s";
}

std::string study_csv_row(const StudyRun& run) {
  std::ostringstream out;
  out << run.seed << ',' << run.fraction << ',' << to_string(run.mode) << ','
      << to_string(run.status) << ',' << run.root_dom_total << ',' << run.nodes << ','
      << run.failures << ',' << round_to(run.time_s, 3);
  return out.str();
}

std::string study_json(const std::vector<StudyRun>& runs) {
  json arr = json::array();
  for (const auto& run : runs) arr.push_back(base_json(run));
  return arr.dump(2);
}

}  // namespace bincp
