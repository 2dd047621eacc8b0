#include "wpnav/world/geodesic.hpp"

#include <cmath>
#include <functional>
#include <queue>
#include <utility>

#include "wpnav/common/error.hpp"

namespace wpnav {

DistanceField::DistanceField(const OccupancyGrid& grid, Point source)
    : grid_(&grid), source_(grid.cell_at(source)) {
  require_free_point(grid, source);
  const std::size_t n = grid.raw().size();
  dist_.assign(n, kUnreachable);
  parent_.assign(n, -1);

  const double straight = grid.resolution();
  const double diagonal = grid.resolution() * std::sqrt(2.0);
  using Entry = std::pair<double, std::size_t>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<Entry>> open;

  const std::size_t s = grid.index(source_.cx, source_.cy);
  dist_[s] = 0.0;
  open.emplace(0.0, s);
  while (!open.empty()) {
    const auto [d, i] = open.top();
    open.pop();
    if (d > dist_[i]) continue;
    const Cell c = grid.cell_of_index(i);
    for (int dy = -1; dy <= 1; ++dy) {
      for (int dx = -1; dx <= 1; ++dx) {
        if (dx == 0 && dy == 0) continue;
        const int nx = c.cx + dx, ny = c.cy + dy;
        if (grid.blocked(nx, ny)) continue;
        const bool diag = dx != 0 && dy != 0;
        if (diag && grid.blocked(c.cx + dx, c.cy) && grid.blocked(c.cx, c.cy + dy)) continue;
        const std::size_t ni = grid.index(nx, ny);
        const double nd = d + (diag ? diagonal : straight);
        if (nd < dist_[ni]) {
          dist_[ni] = nd;
          parent_[ni] = static_cast<int>(i);
          open.emplace(nd, ni);
        }
      }
    }
  }
}

double DistanceField::at(Cell c) const {
  if (grid_->blocked(c.cx, c.cy)) return kUnreachable;
  return dist_[grid_->index(c.cx, c.cy)];
}

double DistanceField::at(Point p) const { return at(grid_->cell_at(p)); }

std::vector<Point> DistanceField::path_from(Point p) const {
  std::vector<Point> out;
  const Cell c = grid_->cell_at(p);
  if (at(c) == kUnreachable) return out;
  int i = static_cast<int>(grid_->index(c.cx, c.cy));
  while (i >= 0) {
    out.push_back(grid_->cell_center(grid_->cell_of_index(static_cast<std::size_t>(i))));
    i = parent_[static_cast<std::size_t>(i)];
  }
  return out;
}

double geodesic_distance(const OccupancyGrid& grid, Point a, Point b) {
  require_free_point(grid, a);
  require_free_point(grid, b);
  if (grid.cell_at(a) == grid.cell_at(b)) return 0.0;
  return DistanceField(grid, a).at(b);
}

std::vector<Point> shortest_path(const OccupancyGrid& grid, Point a, Point b) {
  require_free_point(grid, a);
  require_free_point(grid, b);
  // Field rooted at b so that walking parents from a yields a -> b order.
  return DistanceField(grid, b).path_from(a);
}

double polyline_length(const std::vector<Point>& path) {
  double total = 0.0;
  for (std::size_t i = 1; i < path.size(); ++i) total += distance(path[i - 1], path[i]);
  return total;
}

}  // namespace wpnav
