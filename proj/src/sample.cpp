#include "bgeps/sample.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace bgeps {

BivariateSample BivariateSample::from_pairs(const std::vector<std::pair<double, double>>& pairs) {
  BivariateSample s;
  s.y1.reserve(pairs.size());
  s.y2.reserve(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto [a, b] = pairs[i];
    if (!(a > 0.0) || !(b > 0.0) || !std::isfinite(a) || !std::isfinite(b))
      throw std::invalid_argument("observation " + std::to_string(i + 1) +
                                  ": coordinates must be positive and finite");
    s.y1.push_back(a);
    s.y2.push_back(b);
    if (a == b)
      s.i0.push_back(i);
    else if (a < b)
      s.i1.push_back(i);
    else
      s.i2.push_back(i);
  }
  return s;
}

}  // namespace bgeps
