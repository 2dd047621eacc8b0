#pragma once

#include <cstdint>
#include <string>

#include "wpnav/world/grid.hpp"

namespace wpnav {

enum class Layout { open_room, rooms };

std::string to_string(Layout layout);
Layout layout_from_string(const std::string& s);

struct WorldParams {
  Layout layout = Layout::rooms;
  double width_m = 12.0;
  double height_m = 12.0;
  double resolution = 0.1;
  // rooms layout
  int rooms = 4;
  double room_min_m = 2.5;
  double room_max_m = 5.0;
  double corridor_width_m = 1.0;
  // pillars scattered in free space (both layouts)
  int obstacles = 3;
  double obstacle_min_m = 0.3;
  double obstacle_max_m = 0.6;
  int max_attempts = 200;
};

// Deterministic in seed. The result has a blocked boundary and a single
// connected free component. Throws GenerationError for infeasible params.
OccupancyGrid generate_world(std::uint64_t seed, const WorldParams& params);

}  // namespace wpnav
