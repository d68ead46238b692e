#pragma once

#include <string>
#include <utility>
#include <vector>

namespace bincp {

// Curriculum instance: assign courses to semesters.
// File format:
//   <courses> <semesters> <min_courses> <max_courses> <min_load> <max_load>
//   <course_id> <credits>          (one line per course, ids 1..courses)
//   prereq <a> <b>                 (course a in a strictly earlier semester)
struct BacpInstance {
  int semesters = 0;
  int min_courses = 0, max_courses = 0;
  int min_load = 0, max_load = 0;
  std::vector<int> credits;                   // credits[i] for course i+1
  std::vector<std::pair<int, int>> prereqs;   // 1-based (before, after)

  int num_courses() const { return (int)credits.size(); }
  long long total_credits() const;
};

BacpInstance parse_bacp(const std::string& text, const std::string& origin);
BacpInstance load_bacp_file(const std::string& path);
std::string format_bacp(const BacpInstance& inst);

// One nursery zone: patient acuities, S slots per nurse.
// File format:
//   zone <slots_per_nurse>
//   <acuity> <acuity> ...          (whitespace separated, any layout)
struct BnwpZone {
  int slots_per_nurse = 0;
  std::vector<int> acuities;

  int num_patients() const { return (int)acuities.size(); }
  int num_nurses() const {
    return (num_patients() + slots_per_nurse - 1) / slots_per_nurse;
  }
};

BnwpZone parse_zone(const std::string& text, const std::string& origin);
BnwpZone load_zone_file(const std::string& path);

}  // namespace bincp
