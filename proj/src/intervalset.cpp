#include "bincp/intervalset.hpp"

#include <algorithm>
#include <cassert>

namespace bincp {

IntervalSet IntervalSet::interval(int lo, int hi) {
  IntervalSet s;
  if (lo <= hi) s.ranges_.push_back({lo, hi});
  return s;
}

IntervalSet IntervalSet::of(std::initializer_list<int> vs) {
  std::vector<int> tmp(vs);
  return from_values(tmp);
}

IntervalSet IntervalSet::from_values(std::span<const int> vs) {
  std::vector<int> tmp(vs.begin(), vs.end());
  std::sort(tmp.begin(), tmp.end());
  tmp.erase(std::unique(tmp.begin(), tmp.end()), tmp.end());
  IntervalSet s;
  for (int v : tmp) {
    if (!s.ranges_.empty() && s.ranges_.back().hi + 1 == v)
      s.ranges_.back().hi = v;
    else
      s.ranges_.push_back({v, v});
  }
  return s;
}

long long IntervalSet::size() const {
  long long n = 0;
  for (const Range& r : ranges_) n += (long long)r.hi - r.lo + 1;
  return n;
}

bool IntervalSet::contains(int v) const {
  auto it = std::upper_bound(ranges_.begin(), ranges_.end(), v,
                             [](int x, const Range& r) { return x < r.lo; });
  if (it == ranges_.begin()) return false;
  --it;
  return v <= it->hi;
}

long long IntervalSet::count_in(int lo, int hi) const {
  long long n = 0;
  for (const Range& r : ranges_) {
    int a = std::max(r.lo, lo), b = std::min(r.hi, hi);
    if (a <= b) n += (long long)b - a + 1;
  }
  return n;
}

IntervalSet IntervalSet::intersect(int lo, int hi) const {
  IntervalSet out;
  for (const Range& r : ranges_) {
    int a = std::max(r.lo, lo), b = std::min(r.hi, hi);
    if (a <= b) out.ranges_.push_back({a, b});
  }
  return out;
}

int IntervalSet::next_ge(int v, int fallback) const {
  for (const Range& r : ranges_) {
    if (r.hi < v) continue;
    return std::max(r.lo, v);
  }
  return fallback;
}

int IntervalSet::prev_le(int v, int fallback) const {
  int best = fallback;
  for (const Range& r : ranges_) {
    if (r.lo > v) break;
    best = std::min(r.hi, v);
  }
  return best;
}

IntervalSet IntervalSet::erase_range(int lo, int hi) {
  IntervalSet removed;
  if (lo > hi || ranges_.empty()) return removed;
  std::vector<Range> kept;
  kept.reserve(ranges_.size() + 1);
  for (const Range& r : ranges_) {
    if (r.hi < lo || r.lo > hi) {
      kept.push_back(r);
      continue;
    }
    int a = std::max(r.lo, lo), b = std::min(r.hi, hi);
    removed.ranges_.push_back({a, b});
    if (r.lo < a) kept.push_back({r.lo, a - 1});
    if (b < r.hi) kept.push_back({b + 1, r.hi});
  }
  ranges_ = std::move(kept);
  return removed;
}

void IntervalSet::insert_disjoint(const IntervalSet& removed) {
  if (removed.empty()) return;
  std::vector<Range> merged;
  merged.reserve(ranges_.size() + removed.ranges_.size());
  auto a = ranges_.begin(), ae = ranges_.end();
  auto b = removed.ranges_.begin(), be = removed.ranges_.end();
  auto push = [&merged](Range r) {
    if (!merged.empty() && merged.back().hi + 1 >= r.lo) {
      assert(merged.back().hi < r.lo);  // disjointness
      merged.back().hi = r.hi;
    } else {
      merged.push_back(r);
    }
  };
  while (a != ae || b != be) {
    if (b == be || (a != ae && a->lo < b->lo))
      push(*a++);
    else
      push(*b++);
  }
  ranges_ = std::move(merged);
}

std::vector<int> IntervalSet::values() const {
  std::vector<int> out;
  out.reserve(size());
  for_each([&out](int v) { out.push_back(v); });
  return out;
}

std::string IntervalSet::to_string() const {
  std::string s = "{";
  bool first = true;
  for (const Range& r : ranges_) {
    if (!first) s += ",";
    first = false;
    s += std::to_string(r.lo);
    if (r.hi != r.lo) s += ".." + std::to_string(r.hi);
  }
  return s + "}";
}

}  // namespace bincp
