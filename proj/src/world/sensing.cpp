#include "wpnav/world/sensing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "wpnav/common/error.hpp"

namespace wpnav {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Walks the cells crossed by the ray origin + t*dir for t in [0, limit].
// Returns the entry parameter of the first blocked cell, or limit.
double traverse(const OccupancyGrid& grid, Point origin, double dx, double dy,
                double limit) {
  const double res = grid.resolution();
  Cell c = grid.cell_at(origin);
  const int step_x = dx > 0 ? 1 : (dx < 0 ? -1 : 0);
  const int step_y = dy > 0 ? 1 : (dy < 0 ? -1 : 0);

  auto next_x = [&](int cx) {
    if (step_x == 0) return kInf;
    const double boundary = (step_x > 0 ? cx + 1 : cx) * res;
    return (boundary - origin.x) / dx;
  };
  auto next_y = [&](int cy) {
    if (step_y == 0) return kInf;
    const double boundary = (step_y > 0 ? cy + 1 : cy) * res;
    return (boundary - origin.y) / dy;
  };

  double t_x = next_x(c.cx);
  double t_y = next_y(c.cy);
  while (true) {
    double t;
    if (t_x < t_y) {
      t = t_x;
      c.cx += step_x;
      t_x = next_x(c.cx);
    } else {
      t = t_y;
      c.cy += step_y;
      t_y = next_y(c.cy);
    }
    t = std::max(t, 0.0);
    if (t >= limit) return limit;
    if (grid.blocked(c.cx, c.cy)) return t;
  }
}

}  // namespace

double raycast(const OccupancyGrid& grid, Point origin, double angle, double max_range) {
  if (!grid.is_free_point(origin))
    throw InvalidPose("raycast origin is not in free space");
  if (!(max_range > 0.0)) throw InvalidArgument("raycast max_range must be positive");
  return traverse(grid, origin, std::cos(angle), std::sin(angle), max_range);
}

RangeScan panorama_scan(const OccupancyGrid& grid, const Pose& pose,
                        const ScanParams& params) {
  require_free_pose(grid, pose);
  if (params.rays_per_sector < 1) throw InvalidArgument("rays_per_sector must be >= 1");
  RangeScan scan;
  scan.max_range = params.max_range;
  const int k = params.rays_per_sector;
  for (int i = 0; i < kSectors; ++i) {
    double best = params.max_range;
    for (int j = 0; j < k; ++j) {
      const double rel = RangeScan::sector_center(i) +
                         ((j + 0.5) / k - 0.5) * kSectorWidth;
      best = std::min(best, raycast(grid, pose.position(), pose.heading + rel,
                                    params.max_range));
    }
    scan.readings[static_cast<std::size_t>(i)] = best;
  }
  return scan;
}

bool segment_clear(const OccupancyGrid& grid, Point a, Point b) {
  if (!grid.is_free_point(a) || !grid.is_free_point(b)) return false;
  const double len = distance(a, b);
  if (len == 0.0) return true;
  const double dx = (b.x - a.x) / len;
  const double dy = (b.y - a.y) / len;
  return traverse(grid, a, dx, dy, len) >= len;
}

}  // namespace wpnav
