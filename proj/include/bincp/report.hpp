#pragma once

#include <optional>
#include <string>
#include <vector>

#include "bincp/models.hpp"

namespace bincp {

// Uniform run summary emitted by the command line tool.
struct RunReport {
  std::string instance;
  std::string mode;
  std::string status;  // sat | unsat | timeout
  long long nodes = 0;
  long long failures = 0;
  double time_s = 0;
  std::optional<std::vector<int>> solution;
  std::optional<double> statistic;
  std::optional<std::string> statistic_exact;  // "num/den"
  std::optional<double> objective;
};

const char* to_string(SearchStatus status);

std::string to_json(const RunReport& report);

// Study rows; one line per (seed, mode) run.
std::string study_csv_header();
std::string study_csv_row(const StudyRun& run);
std::string study_json(const std::vector<StudyRun>& runs);

}  // namespace bincp
