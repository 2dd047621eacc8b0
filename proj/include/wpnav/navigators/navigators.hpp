#pragma once

#include <string>
#include <vector>

#include "wpnav/actionspace/actions.hpp"
#include "wpnav/navigators/commands.hpp"
#include "wpnav/world/grid.hpp"

namespace wpnav {

enum class NavigatorKind { continuous, discrete };

std::string to_string(NavigatorKind k);  // "cn" / "dn"
NavigatorKind navigator_from_string(const std::string& s);

struct NavigationOutcome {
  Pose final_pose;
  std::vector<Command> commands;  // executed commands
  std::vector<Point> path;        // start position, then one vertex per translate
  bool collided = false;
  bool complete = true;
  double residual = 0.0;  // meters from final position to the waypoint target
};

struct DiscreteNavParams {
  double turn = deg2rad(15.0);
  double step = 0.25;
  double align_tolerance = deg2rad(7.5);
  int step_cap = 64;
};

// Stop short of a blocked cell by this much so the final pose stays in free space.
inline constexpr double kContactMargin = 1e-6;

// World target point of a relative waypoint from a pose.
Point waypoint_target(const Pose& pose, const PolarWaypoint& wp);

// Rotate to the waypoint bearing (skipped below 1e-6 rad), then translate r,
// stopping at first obstacle contact.
NavigationOutcome continuous_navigate(const OccupancyGrid& grid, const Pose& pose,
                                      const PolarWaypoint& wp);

// Greedy 15 degree / 0.25 m navigator. Decisions use a dead-reckoned pose that
// assumes free space; obstacle contact truncates motion in the world only.
NavigationOutcome discrete_navigate(const OccupancyGrid& grid, const Pose& pose,
                                    const PolarWaypoint& wp,
                                    const DiscreteNavParams& params = {});

NavigationOutcome navigate(NavigatorKind kind, const OccupancyGrid& grid, const Pose& pose,
                           const PolarWaypoint& wp);

}  // namespace wpnav
