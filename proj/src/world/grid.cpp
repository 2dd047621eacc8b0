#include "wpnav/world/grid.hpp"

#include <cmath>
#include <string>

#include "wpnav/common/error.hpp"

namespace wpnav {

double norm(Point p) { return std::hypot(p.x, p.y); }
double distance(Point a, Point b) { return norm(a - b); }

OccupancyGrid::OccupancyGrid(int width, int height, double resolution, bool fill_blocked)
    : width_(width), height_(height), resolution_(resolution) {
  if (width <= 0 || height <= 0 || !(resolution > 0.0))
    throw InvalidArgument("grid dimensions and resolution must be positive");
  cells_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height),
                fill_blocked ? 1 : 0);
}

OccupancyGrid::OccupancyGrid(int width, int height, double resolution,
                             std::vector<std::uint8_t> blocked)
    : width_(width), height_(height), resolution_(resolution), cells_(std::move(blocked)) {
  if (width <= 0 || height <= 0 || !(resolution > 0.0))
    throw InvalidArgument("grid dimensions and resolution must be positive");
  if (cells_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height))
    throw InvalidArgument("cell buffer does not match grid dimensions");
  for (auto& c : cells_) c = c ? 1 : 0;
}

Cell OccupancyGrid::cell_at(Point p) const {
  return {static_cast<int>(std::floor(p.x / resolution_)),
          static_cast<int>(std::floor(p.y / resolution_))};
}

Point OccupancyGrid::cell_center(Cell c) const {
  return {(c.cx + 0.5) * resolution_, (c.cy + 0.5) * resolution_};
}

bool OccupancyGrid::is_free_point(Point p) const {
  if (!std::isfinite(p.x) || !std::isfinite(p.y)) return false;
  const Cell c = cell_at(p);
  return free(c.cx, c.cy);
}

std::size_t OccupancyGrid::free_count() const {
  std::size_t n = 0;
  for (auto c : cells_) n += (c == 0);
  return n;
}

int OccupancyGrid::free_components() const {
  std::vector<int> label(cells_.size(), -1);
  std::vector<std::size_t> stack;
  int components = 0;
  for (std::size_t start = 0; start < cells_.size(); ++start) {
    if (cells_[start] != 0 || label[start] >= 0) continue;
    label[start] = components;
    stack.push_back(start);
    while (!stack.empty()) {
      const Cell c = cell_of_index(stack.back());
      stack.pop_back();
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          if (dx == 0 && dy == 0) continue;
          const int nx = c.cx + dx, ny = c.cy + dy;
          if (blocked(nx, ny)) continue;
          // Same diagonal rule as the geodesic solver.
          if (dx != 0 && dy != 0 && blocked(c.cx + dx, c.cy) && blocked(c.cx, c.cy + dy))
            continue;
          const std::size_t ni = index(nx, ny);
          if (label[ni] >= 0) continue;
          label[ni] = components;
          stack.push_back(ni);
        }
      }
    }
    ++components;
  }
  return components;
}

void OccupancyGrid::validate() const {
  for (int x = 0; x < width_; ++x) {
    if (!blocked(x, 0) || !blocked(x, height_ - 1))
      throw GenerationError("grid boundary must be blocked");
  }
  for (int y = 0; y < height_; ++y) {
    if (!blocked(0, y) || !blocked(width_ - 1, y))
      throw GenerationError("grid boundary must be blocked");
  }
  if (free_count() == 0) throw GenerationError("grid has no free cell");
}

void require_free_pose(const OccupancyGrid& grid, const Pose& pose) {
  if (!grid.is_free_point(pose.position()) || !std::isfinite(pose.heading))
    throw InvalidPose("pose (" + std::to_string(pose.x) + ", " + std::to_string(pose.y) +
                      ") is not in free space");
}

void require_free_point(const OccupancyGrid& grid, Point p) {
  if (!grid.is_free_point(p))
    throw InvalidPoint("point (" + std::to_string(p.x) + ", " + std::to_string(p.y) +
                       ") is not in free space");
}

}  // namespace wpnav
