#include "wpnav/navigators/navigators.hpp"

#include <algorithm>
#include <cmath>

#include "wpnav/common/error.hpp"
#include "wpnav/world/sensing.hpp"

namespace wpnav {
namespace {

// Executes a translate in the world, truncating at contact. Returns the
// executed distance.
double move_in_world(const OccupancyGrid& grid, Pose& pose, double meters, bool& collided) {
  if (meters <= 0.0) return 0.0;
  const double free = raycast(grid, pose.position(), pose.heading, meters);
  double d = meters;
  if (free < meters) {
    collided = true;
    d = std::max(0.0, free - kContactMargin);
  }
  if (d > 0.0) pose = apply_command(pose, Command::translate(d));
  return d;
}

}  // namespace

std::string to_string(NavigatorKind k) { return k == NavigatorKind::continuous ? "cn" : "dn"; }

NavigatorKind navigator_from_string(const std::string& s) {
  if (s == "cn" || s == "continuous") return NavigatorKind::continuous;
  if (s == "dn" || s == "discrete") return NavigatorKind::discrete;
  throw InvalidArgument("unknown navigator '" + s + "'");
}

Point waypoint_target(const Pose& pose, const PolarWaypoint& wp) {
  const double h = wrap_2pi(pose.heading + wrap_pi(wp.theta));
  return {pose.x + wp.r * std::cos(h), pose.y + wp.r * std::sin(h)};
}

NavigationOutcome continuous_navigate(const OccupancyGrid& grid, const Pose& pose,
                                      const PolarWaypoint& wp) {
  require_free_pose(grid, pose);
  if (!std::isfinite(wp.r) || wp.r < 0.0 || !std::isfinite(wp.theta))
    throw InvalidArgument("waypoint distance must be finite and nonnegative");
  NavigationOutcome out;
  out.path.push_back(pose.position());
  Pose p = pose;
  const double angle = wrap_pi(wp.theta);
  if (std::abs(angle) >= 1e-6) {
    out.commands.push_back(Command::rotate(angle));
    p = apply_command(p, out.commands.back());
  }
  const double moved = move_in_world(grid, p, wp.r, out.collided);
  if (moved > 0.0) {
    out.commands.push_back(Command::translate(moved));
    out.path.push_back(p.position());
  }
  out.final_pose = p;
  out.residual = distance(p.position(), waypoint_target(pose, wp));
  return out;
}

NavigationOutcome discrete_navigate(const OccupancyGrid& grid, const Pose& pose,
                                    const PolarWaypoint& wp, const DiscreteNavParams& params) {
  require_free_pose(grid, pose);
  if (!std::isfinite(wp.r) || wp.r < 0.0 || !std::isfinite(wp.theta))
    throw InvalidArgument("waypoint distance must be finite and nonnegative");
  NavigationOutcome out;
  out.path.push_back(pose.position());
  const Point target = waypoint_target(pose, wp);
  Pose believed = pose;
  Pose actual = pose;
  out.complete = false;
  for (int issued = 0; issued < params.step_cap; ++issued) {
    const Point delta = target - believed.position();
    const double d = norm(delta);
    // No forward step can get closer from here.
    if (d <= 0.5 * params.step + 1e-12) {
      out.complete = true;
      break;
    }
    const double error = d > 0.0 ? wrap_pi(std::atan2(delta.y, delta.x) - believed.heading) : 0.0;
    if (std::abs(error) > params.align_tolerance + 1e-9) {
      // Exact reversal ties turn left.
      const double sign = (error > 0.0 || std::abs(error) > kPi - 1e-9) ? 1.0 : -1.0;
      const Command turn = Command::rotate(sign * params.turn);
      believed = apply_command(believed, turn);
      actual = apply_command(actual, turn);
      out.commands.push_back(turn);
      continue;
    }
    const Pose ahead = apply_command(believed, Command::translate(params.step));
    if (!(distance(ahead.position(), target) < d - 1e-12)) {
      out.complete = true;
      break;
    }
    believed = ahead;
    const double moved = move_in_world(grid, actual, params.step, out.collided);
    out.commands.push_back(Command::translate(moved));
    out.path.push_back(actual.position());
  }
  out.final_pose = actual;
  out.residual = distance(actual.position(), target);
  return out;
}

NavigationOutcome navigate(NavigatorKind kind, const OccupancyGrid& grid, const Pose& pose,
                           const PolarWaypoint& wp) {
  return kind == NavigatorKind::continuous ? continuous_navigate(grid, pose, wp)
                                           : discrete_navigate(grid, pose, wp);
}

}  // namespace wpnav
