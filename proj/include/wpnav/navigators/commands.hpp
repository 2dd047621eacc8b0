#pragma once

#include <string>
#include <vector>

#include "wpnav/world/grid.hpp"

namespace wpnav {

struct Command {
  enum class Kind { rotate, translate, stop };

  Kind kind = Kind::stop;
  double value = 0.0;  // radians for rotate (in (-pi, pi]), meters for translate

  static Command rotate(double radians);
  static Command translate(double meters);
  static Command stop() { return {}; }

  bool is_rotate() const { return kind == Kind::rotate; }
  bool is_translate() const { return kind == Kind::translate; }
  bool is_stop() const { return kind == Kind::stop; }
  friend bool operator==(const Command&, const Command&) = default;
};

// Applies commands with perfect actuation and no obstacle handling.
Pose apply_command(const Pose& pose, const Command& c);
Pose replay(const Pose& start, const std::vector<Command>& commands);

// Merges adjacent rotations (sum wrapped to (-pi, pi]), drops commands whose
// magnitude is below epsilon, never merges translations.
std::vector<Command> collapse_commands(const std::vector<Command>& commands,
                                       double epsilon = 1e-9);

// Line-per-command log: "R <degrees>", "T <meters>", "S".
std::string write_command_log(const std::vector<Command>& commands);
// Throws ParseError with the 1-based line number.
std::vector<Command> parse_command_log(const std::string& text);

}  // namespace wpnav
