#include <cmath>

#include "doctest.h"
#include "wpnav/common/angles.hpp"
#include "wpnav/common/error.hpp"
#include "wpnav/metrics/motion_model.hpp"
#include "wpnav/navigators/commands.hpp"
#include "wpnav/navigators/navigators.hpp"
#include "wpnav/world/sensing.hpp"

using namespace wpnav;

namespace {

OccupancyGrid open_room(int cells, double res) {
  OccupancyGrid g(cells, cells, res, false);
  for (int i = 0; i < cells; ++i) {
    g.set_blocked(i, 0, true);
    g.set_blocked(i, cells - 1, true);
    g.set_blocked(0, i, true);
    g.set_blocked(cells - 1, i, true);
  }
  return g;
}

int count_kind(const std::vector<Command>& cmds, Command::Kind k) {
  int n = 0;
  for (const Command& c : cmds) n += c.kind == k;
  return n;
}

}  // namespace

TEST_CASE("continuous navigator in free space") {
  const OccupancyGrid g = open_room(100, 0.1);
  const Pose start{5.0, 5.0, 0.0};
  NavigationOutcome o = continuous_navigate(g, start, {1.0, 0.0});
  REQUIRE(o.commands.size() == 1);
  CHECK(o.commands[0] == Command::translate(1.0));
  CHECK(o.residual == doctest::Approx(0.0).epsilon(1e-12));
  CHECK_FALSE(o.collided);

  o = continuous_navigate(g, start, {1.0, kPi / 2});
  REQUIRE(o.commands.size() == 2);
  CHECK(o.commands[0].is_rotate());
  CHECK(o.commands[0].value == doctest::Approx(kPi / 2));
  CHECK(o.commands[1].value == doctest::Approx(1.0));
  CHECK(o.final_pose.heading == doctest::Approx(kPi / 2));
  CHECK(o.final_pose.y == doctest::Approx(6.0));
  CHECK(o.path.size() == 2);
}

TEST_CASE("continuous navigator stops at contact") {
  OccupancyGrid g = open_room(100, 0.1);
  for (int y = 0; y < 100; ++y) g.set_blocked(55, y, true);  // wall face at x = 5.5
  const NavigationOutcome o = continuous_navigate(g, Pose{5.0, 5.0, 0.0}, {1.0, 0.0});
  CHECK(o.collided);
  // Oracle: contact point from a grid ray cast.
  const double contact = raycast(g, {5.0, 5.0}, 0.0, 1.0);
  CHECK(contact == doctest::Approx(0.5));
  CHECK(o.final_pose.x == doctest::Approx(5.0 + contact).epsilon(1e-5));
  CHECK(g.is_free_point(o.final_pose.position()));
  CHECK(o.residual == doctest::Approx(0.5).epsilon(1e-4));
}

TEST_CASE("discrete navigator decision rule") {
  const OccupancyGrid g = open_room(100, 0.1);
  const Pose start{5.0, 5.0, 0.0};
  NavigationOutcome o = discrete_navigate(g, start, {0.25, 0.0});
  REQUIRE(o.commands.size() == 1);
  CHECK(o.commands[0] == Command::translate(0.25));
  CHECK(o.residual < 1e-9);

  o = discrete_navigate(g, start, {0.5, deg2rad(30.0)});
  const std::vector<Command> expected{Command::rotate(deg2rad(15.0)),
                                      Command::rotate(deg2rad(15.0)),
                                      Command::translate(0.25), Command::translate(0.25)};
  CHECK(o.commands == expected);
  CHECK(o.residual < 1e-9);

  o = discrete_navigate(g, start, {1.0, kPi});
  CHECK(o.commands.size() == 16);
  CHECK(count_kind(o.commands, Command::Kind::rotate) == 12);
  for (int i = 0; i < 12; ++i) CHECK(o.commands[i].value > 0.0);  // ties turn left
  CHECK(count_kind(o.commands, Command::Kind::translate) == 4);
}

TEST_CASE("discrete navigator residual bound in free space") {
  const OccupancyGrid g = open_room(120, 0.1);
  Rng rng(3);
  for (int k = 0; k < 500; ++k) {
    const PolarWaypoint wp{rng.uniform(0.0, 4.0), rng.uniform(0.0, kTwoPi)};
    const NavigationOutcome o = discrete_navigate(g, Pose{6.0, 6.0, rng.uniform(0.0, kTwoPi)}, wp);
    CHECK(o.residual <= 0.25 + 1e-9);
    CHECK_FALSE(o.collided);
  }
}

TEST_CASE("navigator swap reaches the same free-space target") {
  const OccupancyGrid g = open_room(100, 0.1);
  const Pose start{5.0, 5.0, 1.0};
  const PolarWaypoint wp{2.0, deg2rad(75.0)};
  const Point target = waypoint_target(start, wp);
  const NavigationOutcome c = navigate(NavigatorKind::continuous, g, start, wp);
  const NavigationOutcome d = navigate(NavigatorKind::discrete, g, start, wp);
  CHECK(distance(c.final_pose.position(), target) < 1e-9);
  CHECK(distance(d.final_pose.position(), target) <= 0.25);
  CHECK(d.commands.size() > c.commands.size());
}

TEST_CASE("command collapse") {
  const double t = deg2rad(15.0);
  CHECK(collapse_commands({Command::rotate(t), Command::rotate(t), Command::translate(0.25)}) ==
        std::vector<Command>{Command::rotate(2 * t), Command::translate(0.25)});
  CHECK(collapse_commands({Command::rotate(deg2rad(10.0)), Command::rotate(deg2rad(-10.0))})
            .empty());
  CHECK(collapse_commands({Command::translate(0.25), Command::translate(0.25)}) ==
        std::vector<Command>{Command::translate(0.25), Command::translate(0.25)});
  // Merged rotations wrap.
  const auto wrapped = collapse_commands(std::vector<Command>(13, Command::rotate(t)));
  REQUIRE(wrapped.size() == 1);
  CHECK(wrapped[0].value == doctest::Approx(-165.0 * kPi / 180.0));
  // Endpoint of the command stream is unchanged.
  Rng rng(8);
  for (int k = 0; k < 200; ++k) {
    std::vector<Command> cmds;
    for (int i = 0; i < 20; ++i)
      cmds.push_back(rng.uniform() < 0.6 ? Command::rotate(rng.uniform() < 0.5 ? t : -t)
                                         : Command::translate(0.25));
    const Pose a = replay(Pose{}, cmds);
    const Pose b = replay(Pose{}, collapse_commands(cmds));
    CHECK(a.x == doctest::Approx(b.x));
    CHECK(a.y == doctest::Approx(b.y));
    CHECK(std::abs(wrap_pi(a.heading - b.heading)) < 1e-9);
  }
}

TEST_CASE("collapse is not time-monotone for arbitrary angles") {
  // Quadratic rotation cost: merging two 60 degree turns into one of 120
  // costs more than issuing them separately.
  const MotionModel m;
  const std::vector<Command> two{Command::rotate(deg2rad(60.0)), Command::rotate(deg2rad(60.0))};
  CHECK(eet(collapse_commands(two), m) > eet(two, m));
  CHECK(eet(collapse_commands(two), m) == doctest::Approx(m.rotate_time(120.0)));
}

TEST_CASE("command log round trip") {
  const std::vector<Command> cmds{Command::rotate(deg2rad(30.0)), Command::translate(1.25),
                                  Command::rotate(deg2rad(-15.0)), Command::stop()};
  const std::string log = write_command_log(cmds);
  CHECK(log.rfind("R 30", 0) == 0);
  const std::vector<Command> back = parse_command_log(log);
  REQUIRE(back.size() == cmds.size());
  for (std::size_t i = 0; i < cmds.size(); ++i) {
    CHECK(back[i].kind == cmds[i].kind);
    CHECK(back[i].value == doctest::Approx(cmds[i].value).epsilon(1e-12));
  }
  try {
    parse_command_log("R 10\nX 3\n");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
  CHECK(navigator_from_string("dn") == NavigatorKind::discrete);
  CHECK(to_string(NavigatorKind::continuous) == "cn");
  CHECK_THROWS_AS(navigator_from_string("zz"), InvalidArgument);
}
