#pragma once

#include <string>

#include "wpnav/metrics/vln_metrics.hpp"
#include "wpnav/world/grid.hpp"

namespace wpnav {

// SVG map of one episode: free space gray, obstacles dark, start square
// blue, goal square red, the executed path as a polyline and one heading
// marker per waypoint decision. Output is a pure function of the inputs.
std::string render_svg(const OccupancyGrid& grid, const EpisodeResult& result,
                       const std::string& comment = "");

}  // namespace wpnav
