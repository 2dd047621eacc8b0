#include "wpnav/metrics/motion_model.hpp"

#include <cmath>

#include "wpnav/common/angles.hpp"
#include "wpnav/common/error.hpp"

namespace wpnav {

double MotionModel::rotate_time(double degrees) const {
  if (!(degrees >= 0.0)) throw InvalidArgument("rotation magnitude must be nonnegative");
  if (degrees < null_command_epsilon) return 0.0;
  return (a2 * degrees + a1) * degrees + a0;
}

double MotionModel::translate_time(double meters) const {
  if (!(meters >= 0.0)) throw InvalidArgument("translation distance must be nonnegative");
  if (meters < null_command_epsilon) return 0.0;
  return b1 * meters + b0;
}

double MotionModel::command_time(const Command& c) const {
  switch (c.kind) {
    case Command::Kind::rotate: return rotate_time(std::abs(rad2deg(c.value)));
    case Command::Kind::translate: return translate_time(c.value);
    case Command::Kind::stop: return 0.0;
  }
  return 0.0;
}

bool MotionModel::valid() const {
  // Quadratic is monotone on [0, 180] iff its derivative is nonnegative at both ends.
  const bool rot_ok = a0 >= 0.0 && a1 >= 0.0 && a1 + 2.0 * a2 * 180.0 >= 0.0 &&
                      rotate_time(180.0) >= 0.0;
  const bool trans_ok = b0 >= 0.0 && b1 >= 0.0;
  return rot_ok && trans_ok;
}

double eet(const std::vector<Command>& commands, const MotionModel& m) {
  double total = 0.0;
  for (const Command& c : commands) total += m.command_time(c);
  return total;
}

}  // namespace wpnav
