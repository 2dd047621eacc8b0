#pragma once

#include <string>
#include <vector>

#include "wpnav/navigators/commands.hpp"

namespace wpnav {

// Point-turn robot timing model. Rotation time is quadratic in the turn
// magnitude (degrees), translation time linear in distance (meters). The
// defaults are the MoveBase fits of the LoCoBot profile.
struct MotionModel {
  double a2 = 0.000358;
  double a1 = 0.108;
  double a0 = 2.23;
  double b1 = 4.2;
  double b0 = 0.362;
  double null_command_epsilon = 1e-6;

  // Throws InvalidArgument for negative magnitudes.
  double rotate_time(double degrees) const;
  double translate_time(double meters) const;
  double command_time(const Command& c) const;

  // Checks nonnegativity and monotonicity on [0, 180] deg and [0, 4] m.
  bool valid() const;
};

// Estimated execution time: sum of per-command times, Stop costs 0.
double eet(const std::vector<Command>& commands, const MotionModel& m);

}  // namespace wpnav
