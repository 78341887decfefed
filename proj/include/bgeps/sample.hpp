#pragma once

#include <cstddef>
#include <utility>
#include <vector>

namespace bgeps {

// Observed pairs partitioned by the sign of y1 - y2. Ties are exact
// coordinate equality; any tolerance-based merging happens at load time.
struct BivariateSample {
  std::vector<double> y1, y2;
  std::vector<std::size_t> i0, i1, i2;  // ties, y1 < y2, y1 > y2

  std::size_t size() const { return y1.size(); }
  std::size_t m0() const { return i0.size(); }
  std::size_t m1() const { return i1.size(); }
  std::size_t m2() const { return i2.size(); }

  // Validates strict positivity and computes the partition.
  static BivariateSample from_pairs(const std::vector<std::pair<double, double>>& pairs);
};

}  // namespace bgeps
