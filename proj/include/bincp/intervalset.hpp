#pragma once

#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace bincp {

// Finite set of ints stored as sorted, disjoint, non-adjacent closed ranges.
// The representation is canonical, so operator== is set equality and a
// restore that re-inserts previously erased content is bit-exact.
class IntervalSet {
 public:
  struct Range {
    int lo;
    int hi;  // inclusive
    bool operator==(const Range&) const = default;
  };

  IntervalSet() = default;
  static IntervalSet interval(int lo, int hi);  // [lo,hi]; empty if lo > hi
  static IntervalSet of(std::initializer_list<int> vs);
  static IntervalSet from_values(std::span<const int> vs);

  bool empty() const { return ranges_.empty(); }
  long long size() const;
  int min() const { return ranges_.front().lo; }
  int max() const { return ranges_.back().hi; }
  bool fixed() const { return ranges_.size() == 1 && ranges_[0].lo == ranges_[0].hi; }
  bool contains(int v) const;
  long long count_in(int lo, int hi) const;  // |this ∩ [lo,hi]|
  IntervalSet intersect(int lo, int hi) const;

  // Smallest member >= v / largest member <= v; `fallback` if none.
  int next_ge(int v, int fallback) const;
  int prev_le(int v, int fallback) const;

  // Erase members of [lo,hi] and return exactly what was removed.
  IntervalSet erase_range(int lo, int hi);
  IntervalSet erase_value(int v) { return erase_range(v, v); }

  // Re-insert content that is disjoint from the current set (undo of erase).
  void insert_disjoint(const IntervalSet& removed);

  const std::vector<Range>& ranges() const { return ranges_; }
  std::vector<int> values() const;
  template <typename F>
  void for_each(F&& f) const {
    for (const Range& r : ranges_)
      for (int v = r.lo; v <= r.hi; ++v) f(v);
  }

  bool operator==(const IntervalSet&) const = default;
  std::string to_string() const;  // e.g. "{1..2,4}"

 private:
  std::vector<Range> ranges_;
};

}  // namespace bincp
