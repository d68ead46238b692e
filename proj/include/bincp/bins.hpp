#pragma once

#include <optional>
#include <vector>

#include "bincp/intervalset.hpp"

namespace bincp {

// Contiguous half-open bins [bounds[j], bounds[j+1]) over the integers.
struct BinSpec {
  std::vector<int> bounds;  // strictly increasing, at least 2 entries

  static BinSpec make(std::vector<int> bounds);

  int num_bins() const { return (int)bounds.size() - 1; }
  int lo(int j) const { return bounds[j]; }
  int hi_excl(int j) const { return bounds[j + 1]; }
  std::optional<int> bin_of(int v) const;
  IntervalSet slice(const IntervalSet& dom, int j) const {
    return dom.intersect(lo(j), hi_excl(j) - 1);
  }
};

}  // namespace bincp
