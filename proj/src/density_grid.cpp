#include "bgeps/density_grid.hpp"

#include <stdexcept>

#include "bgeps/parallel.hpp"

namespace bgeps {

namespace {

void check_grid_args(int n, double y_max) {
  if (n < 1) throw std::invalid_argument("density_grid: n must be >= 1");
  if (!(y_max > 0.0)) throw std::invalid_argument("density_grid: y_max must be positive");
}

DensityGridRow off_diagonal_cell(const BgepsParams& p, int n, double y_max, std::size_t flat) {
  // Flat index over the n*(n-1) off-diagonal cells, row-major with the
  // diagonal removed.
  const std::size_t row = flat / static_cast<std::size_t>(n - 1);
  std::size_t col = flat % static_cast<std::size_t>(n - 1);
  if (col >= row) ++col;
  const double y1 = y_max * static_cast<double>(row + 1) / n;
  const double y2 = y_max * static_cast<double>(col + 1) / n;
  const DensityValue d = joint_pdf(p, y1, y2);
  return {y1, y2, d.branch, d.value};
}

DensityGridRow diagonal_cell(const BgepsParams& p, int n, double y_max, std::size_t i) {
  const double y = y_max * static_cast<double>(i + 1) / n;
  const DensityValue d = joint_pdf(p, y, y);
  return {y, y, d.branch, d.value};
}

}  // namespace

std::vector<DensityGridRow> density_grid(const BgepsParams& p, int n, double y_max) {
  validate(p);
  check_grid_args(n, y_max);
  const std::size_t off = static_cast<std::size_t>(n) * (n - 1);
  std::vector<DensityGridRow> rows(off + static_cast<std::size_t>(n));
  parallel_for_index(static_cast<std::ptrdiff_t>(rows.size()), [&](std::size_t i) {
    rows[i] = i < off ? off_diagonal_cell(p, n, y_max, i)
                      : diagonal_cell(p, n, y_max, i - off);
  });
  return rows;
}

std::vector<DensityGridRow> density_grid_serial(const BgepsParams& p, int n, double y_max) {
  validate(p);
  check_grid_args(n, y_max);
  const std::size_t off = static_cast<std::size_t>(n) * (n - 1);
  std::vector<DensityGridRow> rows(off + static_cast<std::size_t>(n));
  for (std::size_t i = 0; i < rows.size(); ++i)
    rows[i] = i < off ? off_diagonal_cell(p, n, y_max, i)
                      : diagonal_cell(p, n, y_max, i - off);
  return rows;
}

}  // namespace bgeps
