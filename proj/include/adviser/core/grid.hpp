#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "adviser/core/geo.hpp"

namespace adviser {

// Rectangular grid of square cells laid over a local planar projection whose
// origin is the south-west corner. Cells are numbered row-major from the
// south-west: index = row * cols + col.
class Grid {
 public:
  Grid() = default;
  Grid(GeoPoint south_west, int rows, int cols, double cell_size_km)
      : south_west_(south_west), rows_(rows), cols_(cols), cell_size_km_(cell_size_km) {
    const LocalProjection proj(south_west_);
    centers_.reserve(static_cast<std::size_t>(rows_) * static_cast<std::size_t>(cols_));
    for (int r = 0; r < rows_; ++r)
      for (int c = 0; c < cols_; ++c)
        centers_.push_back(proj.unproject({(c + 0.5) * cell_size_km_, (r + 0.5) * cell_size_km_}));
  }

  GeoPoint south_west() const { return south_west_; }
  int rows() const { return rows_; }
  int cols() const { return cols_; }
  double cell_size_km() const { return cell_size_km_; }
  int size() const { return rows_ * cols_; }
  const std::vector<GeoPoint>& centers() const { return centers_; }
  GeoPoint center(int cell) const { return centers_.at(static_cast<std::size_t>(cell)); }
  LocalProjection projection() const { return LocalProjection(south_west_); }

  // Cell containing p, or -1 when p falls outside the grid.
  int cell_of(GeoPoint p) const {
    const PlanarPoint q = projection().project(p);
    const int c = static_cast<int>(std::floor(q.x / cell_size_km_));
    const int r = static_cast<int>(std::floor(q.y / cell_size_km_));
    if (r < 0 || r >= rows_ || c < 0 || c >= cols_) return -1;
    return r * cols_ + c;
  }

  double distance_km(GeoPoint p, int cell) const { return haversine_km(p, center(cell)); }

  // Cells whose centre lies within radius_km of p, in increasing index.
  std::vector<int> cells_within(GeoPoint p, double radius_km) const {
    std::vector<int> out;
    const PlanarPoint q = projection().project(p);
    // Planar projection error is tiny at city scale; pad the search box by a
    // cell and let the haversine test decide membership.
    const double pad = radius_km + cell_size_km_;
    const int c0 = std::max(0, static_cast<int>(std::floor((q.x - pad) / cell_size_km_)));
    const int c1 = std::min(cols_ - 1, static_cast<int>(std::floor((q.x + pad) / cell_size_km_)));
    const int r0 = std::max(0, static_cast<int>(std::floor((q.y - pad) / cell_size_km_)));
    const int r1 = std::min(rows_ - 1, static_cast<int>(std::floor((q.y + pad) / cell_size_km_)));
    for (int r = r0; r <= r1; ++r)
      for (int c = c0; c <= c1; ++c) {
        const int g = r * cols_ + c;
        if (distance_km(p, g) <= radius_km) out.push_back(g);
      }
    return out;
  }

 private:
  GeoPoint south_west_;
  int rows_ = 0;
  int cols_ = 0;
  double cell_size_km_ = 1.0;
  std::vector<GeoPoint> centers_;
};

}  // namespace adviser
