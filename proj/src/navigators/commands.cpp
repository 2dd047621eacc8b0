#include "wpnav/navigators/commands.hpp"

#include <cmath>
#include <sstream>

#include "wpnav/common/angles.hpp"
#include "wpnav/common/digest.hpp"
#include "wpnav/common/error.hpp"

namespace wpnav {

Command Command::rotate(double radians) { return {Kind::rotate, wrap_pi(radians)}; }

Command Command::translate(double meters) {
  if (meters < 0.0) throw InvalidArgument("translate distance must be nonnegative");
  return {Kind::translate, meters};
}

Pose apply_command(const Pose& pose, const Command& c) {
  Pose p = pose;
  if (c.is_rotate()) {
    p.heading = wrap_2pi(p.heading + c.value);
  } else if (c.is_translate()) {
    p.x += c.value * std::cos(p.heading);
    p.y += c.value * std::sin(p.heading);
  }
  return p;
}

Pose replay(const Pose& start, const std::vector<Command>& commands) {
  Pose p = start;
  for (const Command& c : commands) p = apply_command(p, c);
  return p;
}

std::vector<Command> collapse_commands(const std::vector<Command>& commands, double epsilon) {
  std::vector<Command> out;
  for (const Command& c : commands) {
    if (c.is_rotate() && !out.empty() && out.back().is_rotate()) {
      out.back().value = wrap_pi(out.back().value + c.value);
    } else {
      out.push_back(c);
    }
    // Null commands, including rotations that cancelled out, are not issued.
    if (!out.back().is_stop() && std::abs(out.back().value) < epsilon) out.pop_back();
  }
  return out;
}

std::string write_command_log(const std::vector<Command>& commands) {
  std::string out;
  for (const Command& c : commands) {
    switch (c.kind) {
      case Command::Kind::rotate: out += "R " + format_double(std::round(rad2deg(c.value) * 1e9) / 1e9) + "\n"; break;
      case Command::Kind::translate: out += "T " + format_double(c.value) + "\n"; break;
      case Command::Kind::stop: out += "S\n"; break;
    }
  }
  return out;
}

std::vector<Command> parse_command_log(const std::string& text) {
  std::vector<Command> out;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string tag;
    ls >> tag;
    if (tag == "S") {
      out.push_back(Command::stop());
      continue;
    }
    double v = 0.0;
    if (!(ls >> v) || !std::isfinite(v)) throw ParseError("missing command value", line_no);
    std::string rest;
    if (ls >> rest) throw ParseError("trailing text after command", line_no);
    if (tag == "R") {
      out.push_back(Command::rotate(deg2rad(v)));
    } else if (tag == "T") {
      if (v < 0.0) throw ParseError("negative translate", line_no);
      out.push_back(Command::translate(v));
    } else {
      throw ParseError("unknown command tag '" + tag + "'", line_no);
    }
  }
  return out;
}

}  // namespace wpnav
