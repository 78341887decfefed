#pragma once

#include <vector>

#include "bgeps/bgeps.hpp"

namespace bgeps {

struct DensityGridRow {
  double y1, y2;
  Branch branch;
  double density;
};

// Evaluates the joint density on an n-by-n grid over (0, y_max]. Off-diagonal
// cells come first in row-major order (per-area density); the diagonal line
// follows as a separate block with its per-length density.
std::vector<DensityGridRow> density_grid(const BgepsParams& p, int n, double y_max);
std::vector<DensityGridRow> density_grid_serial(const BgepsParams& p, int n, double y_max);

}  // namespace bgeps
