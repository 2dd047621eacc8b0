#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "wpnav/metrics/vln_metrics.hpp"

namespace wpnav {

// Phases over each episode's sequence of motion decisions: the first 25%,
// the middle 50% and the last 25% of the decision indices.
enum class Phase { early = 0, middle = 1, late = 2 };

struct WaypointReport {
  std::size_t count = 0;
  double mean = 0.0;
  double std = 0.0;  // population standard deviation
  std::array<double, 3> phase_mean{};
  std::array<std::size_t, 3> phase_count{};

  bool empty() const { return count == 0; }
};

// Phase of decision k among n decisions (by position (k + 0.5) / n).
Phase phase_of(std::size_t k, std::size_t n);

// Predicted distances per episode, STOP decisions excluded.
WaypointReport waypoint_statistics(const std::vector<std::vector<double>>& distances);
WaypointReport waypoint_statistics(const std::vector<EpisodeResult>& results);

}  // namespace wpnav
