#pragma once

#include <limits>
#include <vector>

#include "wpnav/world/grid.hpp"

namespace wpnav {

inline constexpr double kUnreachable = std::numeric_limits<double>::infinity();

// Single-source shortest path lengths over the 8-connected free-cell graph.
// Straight moves cost one resolution, diagonal moves resolution*sqrt(2);
// a diagonal move is disallowed only when both orthogonal neighbours are
// blocked. Points are snapped to their containing cells.
class DistanceField {
 public:
  DistanceField(const OccupancyGrid& grid, Point source);

  Cell source() const { return source_; }
  // kUnreachable when disconnected or blocked.
  double at(Cell c) const;
  double at(Point p) const;

  // Cell-center polyline from p's cell back to the source cell.
  std::vector<Point> path_from(Point p) const;

 private:
  const OccupancyGrid* grid_;
  Cell source_;
  std::vector<double> dist_;
  std::vector<int> parent_;
};

// Throws InvalidPoint for blocked endpoints; kUnreachable if disconnected.
double geodesic_distance(const OccupancyGrid& grid, Point a, Point b);

// Cell-center polyline from a's cell to b's cell; empty when disconnected.
std::vector<Point> shortest_path(const OccupancyGrid& grid, Point a, Point b);

double polyline_length(const std::vector<Point>& path);

}  // namespace wpnav
