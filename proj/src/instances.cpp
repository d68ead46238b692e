#include "bincp/instances.hpp"

#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace bincp {
namespace {

[[noreturn]] void fail(const std::string& origin, int line, const std::string& what) {
  throw std::runtime_error(origin + ":" + std::to_string(line) + ": " + what);
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Strips comments (# to end of line) and splits into (line_number, tokens).
std::vector<std::pair<int, std::vector<std::string>>> tokenize(const std::string& text) {
  std::vector<std::pair<int, std::vector<std::string>>> out;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::vector<std::string> toks;
    std::string tok;
    while (ls >> tok) toks.push_back(tok);
    if (!toks.empty()) out.emplace_back(lineno, std::move(toks));
  }
  return out;
}

int parse_int(const std::string& tok, const std::string& origin, int line) {
  size_t pos = 0;
  int v = 0;
  try {
    v = std::stoi(tok, &pos);
  } catch (const std::exception&) {
    fail(origin, line, "expected integer, got '" + tok + "'");
  }
  if (pos != tok.size()) fail(origin, line, "expected integer, got '" + tok + "'");
  return v;
}

}  // namespace

long long BacpInstance::total_credits() const {
  return std::accumulate(credits.begin(), credits.end(), 0LL);
}

BacpInstance parse_bacp(const std::string& text, const std::string& origin) {
  auto lines = tokenize(text);
  if (lines.empty()) throw std::runtime_error(origin + ": empty instance");

  BacpInstance inst;
  const auto& [hline, header] = lines[0];
  if (header.size() != 6)
    fail(origin, hline, "header must be: courses semesters min_courses max_courses min_load max_load");
  int n = parse_int(header[0], origin, hline);
  inst.semesters = parse_int(header[1], origin, hline);
  inst.min_courses = parse_int(header[2], origin, hline);
  inst.max_courses = parse_int(header[3], origin, hline);
  inst.min_load = parse_int(header[4], origin, hline);
  inst.max_load = parse_int(header[5], origin, hline);
  if (n <= 0) fail(origin, hline, "need at least one course");
  if (inst.semesters <= 0) fail(origin, hline, "need at least one semester");
  if (inst.min_courses < 0 || inst.max_courses < inst.min_courses)
    fail(origin, hline, "bad course count range");
  if (inst.min_load < 0 || inst.max_load < inst.min_load)
    fail(origin, hline, "bad load range");

  inst.credits.assign(n, 0);
  std::vector<bool> seen(n, false);
  size_t li = 1;
  for (int k = 0; k < n; ++k, ++li) {
    if (li >= lines.size()) fail(origin, lines.back().first, "expected " + std::to_string(n) + " course lines");
    const auto& [ln, toks] = lines[li];
    if (toks.size() != 2 || toks[0] == "prereq")
      fail(origin, ln, "expected '<course_id> <credits>'");
    int id = parse_int(toks[0], origin, ln);
    int cr = parse_int(toks[1], origin, ln);
    if (id < 1 || id > n) fail(origin, ln, "course id out of range 1.." + std::to_string(n));
    if (seen[id - 1]) fail(origin, ln, "duplicate course id " + std::to_string(id));
    if (cr <= 0) fail(origin, ln, "credits must be positive");
    seen[id - 1] = true;
    inst.credits[id - 1] = cr;
  }

  for (; li < lines.size(); ++li) {
    const auto& [ln, toks] = lines[li];
    if (toks.size() != 3 || toks[0] != "prereq")
      fail(origin, ln, "expected 'prereq <a> <b>'");
    int a = parse_int(toks[1], origin, ln);
    int b = parse_int(toks[2], origin, ln);
    if (a < 1 || a > n || b < 1 || b > n) fail(origin, ln, "course id out of range");
    if (a == b) fail(origin, ln, "course cannot require itself");
    inst.prereqs.emplace_back(a, b);
  }

  // Prerequisites must admit a topological order, else no schedule exists.
  std::vector<std::vector<int>> succ(n);
  std::vector<int> indeg(n, 0);
  for (auto [a, b] : inst.prereqs) {
    succ[a - 1].push_back(b - 1);
    ++indeg[b - 1];
  }
  std::vector<int> ready;
  for (int i = 0; i < n; ++i)
    if (indeg[i] == 0) ready.push_back(i);
  int emitted = 0;
  while (!ready.empty()) {
    int u = ready.back();
    ready.pop_back();
    ++emitted;
    for (int v : succ[u])
      if (--indeg[v] == 0) ready.push_back(v);
  }
  if (emitted != n) throw std::runtime_error(origin + ": prerequisite cycle");

  return inst;
}

BacpInstance load_bacp_file(const std::string& path) {
  return parse_bacp(slurp(path), path);
}

std::string format_bacp(const BacpInstance& inst) {
  std::ostringstream out;
  out << inst.num_courses() << ' ' << inst.semesters << ' ' << inst.min_courses << ' '
      << inst.max_courses << ' ' << inst.min_load << ' ' << inst.max_load << '\n';
  for (int i = 0; i < inst.num_courses(); ++i)
    out << (i + 1) << ' ' << inst.credits[i] << '\n';
  for (auto [a, b] : inst.prereqs) out << "prereq " << a << ' ' << b << '\n';
  return out.str();
}

BnwpZone parse_zone(const std::string& text, const std::string& origin) {
  auto lines = tokenize(text);
  if (lines.empty()) throw std::runtime_error(origin + ": empty zone file");

  BnwpZone zone;
  const auto& [hline, header] = lines[0];
  if (header.size() != 2 || header[0] != "zone")
    fail(origin, hline, "header must be: zone <slots_per_nurse>");
  zone.slots_per_nurse = parse_int(header[1], origin, hline);
  if (zone.slots_per_nurse <= 0) fail(origin, hline, "slots per nurse must be positive");

  for (size_t li = 1; li < lines.size(); ++li) {
    const auto& [ln, toks] = lines[li];
    for (const auto& tok : toks) {
      int a = parse_int(tok, origin, ln);
      if (a < 0) fail(origin, ln, "acuity must be nonnegative");
      zone.acuities.push_back(a);
    }
  }
  if (zone.acuities.empty())
    throw std::runtime_error(origin + ": zone has no patients");
  return zone;
}

BnwpZone load_zone_file(const std::string& path) {
  return parse_zone(slurp(path), path);
}

}  // namespace bincp
