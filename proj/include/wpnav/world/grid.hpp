#pragma once

#include <cstdint>
#include <optional>
#include <vector>

namespace wpnav {

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

inline Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
inline Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
inline Point operator*(double s, Point p) { return {s * p.x, s * p.y}; }
double norm(Point p);
double distance(Point a, Point b);

// Heading is kept in [0, 2pi); positive rotation is counter-clockwise.
struct Pose {
  double x = 0.0;
  double y = 0.0;
  double heading = 0.0;

  Point position() const { return {x, y}; }
  friend bool operator==(const Pose&, const Pose&) = default;
};

struct Cell {
  int cx = 0;
  int cy = 0;
  friend bool operator==(const Cell&, const Cell&) = default;
};

// Row-major occupancy grid. Cell (cx, cy) covers
// [cx*res, (cx+1)*res) x [cy*res, (cy+1)*res) in world meters.
class OccupancyGrid {
 public:
  OccupancyGrid(int width, int height, double resolution, bool fill_blocked = true);
  OccupancyGrid(int width, int height, double resolution,
                std::vector<std::uint8_t> blocked);

  int width() const { return width_; }
  int height() const { return height_; }
  double resolution() const { return resolution_; }
  double width_m() const { return width_ * resolution_; }
  double height_m() const { return height_ * resolution_; }

  bool in_bounds(int cx, int cy) const {
    return cx >= 0 && cy >= 0 && cx < width_ && cy < height_;
  }
  bool blocked(int cx, int cy) const {
    return !in_bounds(cx, cy) || cells_[index(cx, cy)] != 0;
  }
  bool free(int cx, int cy) const { return !blocked(cx, cy); }
  bool free(Cell c) const { return free(c.cx, c.cy); }
  void set_blocked(int cx, int cy, bool b) { cells_[index(cx, cy)] = b ? 1 : 0; }

  std::size_t index(int cx, int cy) const {
    return static_cast<std::size_t>(cy) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(cx);
  }
  Cell cell_of_index(std::size_t i) const {
    return {static_cast<int>(i % static_cast<std::size_t>(width_)),
            static_cast<int>(i / static_cast<std::size_t>(width_))};
  }

  Cell cell_at(Point p) const;
  Point cell_center(Cell c) const;
  bool is_free_point(Point p) const;

  std::size_t free_count() const;
  const std::vector<std::uint8_t>& raw() const { return cells_; }

  // Number of 8-connected components of free space.
  int free_components() const;

  // Verifies the closed-world and non-empty invariants; throws GenerationError.
  void validate() const;

  friend bool operator==(const OccupancyGrid&, const OccupancyGrid&) = default;

 private:
  int width_;
  int height_;
  double resolution_;
  std::vector<std::uint8_t> cells_;
};

// Throws InvalidPose when the pose is not inside a free cell.
void require_free_pose(const OccupancyGrid& grid, const Pose& pose);
void require_free_point(const OccupancyGrid& grid, Point p);

}  // namespace wpnav
