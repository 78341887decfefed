#pragma once

#include <cstddef>
#include <vector>

namespace bgeps {

// Index-parallel map; f(i) must be independent across i. Results written
// through f are deterministic regardless of thread count.
template <class F>
void parallel_for_index(std::ptrdiff_t n, F&& f) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
  for (std::ptrdiff_t i = 0; i < n; ++i) f(static_cast<std::size_t>(i));
}

// Left-to-right summation; keeps parallel reductions bit-identical to the
// serial reference by fixing the accumulation order.
inline double ordered_sum(const std::vector<double>& xs) {
  double acc = 0.0;
  for (double x : xs) acc += x;
  return acc;
}

}  // namespace bgeps
