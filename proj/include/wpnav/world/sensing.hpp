#pragma once

#include <array>

#include "wpnav/world/grid.hpp"

namespace wpnav {

inline constexpr int kSectors = 12;
inline constexpr double kSectorWidth = kSectors > 0 ? 6.283185307179586 / kSectors : 0.0;

struct ScanParams {
  double max_range = 6.0;
  int rays_per_sector = 5;
};

// Range readings for 12 sectors; sector i is centered at i*30 degrees
// counter-clockwise from the agent heading.
struct RangeScan {
  std::array<double, kSectors> readings{};
  double max_range = 0.0;

  static double sector_center(int i) { return i * kSectorWidth; }
};

// Distance from origin along the ray to the first blocked cell boundary,
// clipped to max_range. Throws InvalidPose if origin is not free.
double raycast(const OccupancyGrid& grid, Point origin, double angle, double max_range);

// Sector i reading is the minimum over rays_per_sector evenly spaced rays
// within the sector's 30 degree arc.
RangeScan panorama_scan(const OccupancyGrid& grid, const Pose& pose,
                        const ScanParams& params = {});

// True if every cell the segment a->b passes through is free.
bool segment_clear(const OccupancyGrid& grid, Point a, Point b);

}  // namespace wpnav
