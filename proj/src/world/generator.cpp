#include "wpnav/world/generator.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "wpnav/common/error.hpp"
#include "wpnav/common/rng.hpp"

namespace wpnav {
namespace {

struct Rect {
  int x0, y0, x1, y1;  // inclusive cell bounds

  bool overlaps(const Rect& o, int margin) const {
    return !(x1 + margin < o.x0 || o.x1 + margin < x0 || y1 + margin < o.y0 ||
             o.y1 + margin < y0);
  }
  int cx() const { return (x0 + x1) / 2; }
  int cy() const { return (y0 + y1) / 2; }
};

int to_cells(double meters, double res) {
  return std::max(1, static_cast<int>(std::lround(meters / res)));
}

void carve(OccupancyGrid& g, const Rect& r) {
  for (int y = r.y0; y <= r.y1; ++y)
    for (int x = r.x0; x <= r.x1; ++x) g.set_blocked(x, y, false);
}

int uniform_int(Rng& rng, int lo, int hi) {
  if (hi <= lo) return lo;
  return lo + static_cast<int>(rng.below(static_cast<std::uint64_t>(hi - lo + 1)));
}

void carve_corridor(OccupancyGrid& g, int ax, int ay, int bx, int by, int width,
                    bool horizontal_first) {
  const int lo = -(width / 2);
  const int hi = lo + width - 1;
  auto clamp_x = [&](int x) { return std::clamp(x, 1, g.width() - 2); };
  auto clamp_y = [&](int y) { return std::clamp(y, 1, g.height() - 2); };
  auto horizontal = [&](int y, int x_from, int x_to) {
    for (int x = std::min(x_from, x_to); x <= std::max(x_from, x_to) + hi; ++x)
      for (int o = lo; o <= hi; ++o) g.set_blocked(clamp_x(x), clamp_y(y + o), false);
  };
  auto vertical = [&](int x, int y_from, int y_to) {
    for (int y = std::min(y_from, y_to); y <= std::max(y_from, y_to) + hi; ++y)
      for (int o = lo; o <= hi; ++o) g.set_blocked(clamp_x(x + o), clamp_y(y), false);
  };
  if (horizontal_first) {
    horizontal(ay, ax, bx);
    vertical(bx, ay, by);
  } else {
    vertical(ax, ay, by);
    horizontal(by, ax, bx);
  }
}

void place_obstacles(OccupancyGrid& g, Rng& rng, const WorldParams& p) {
  const double res = p.resolution;
  const int min_side = to_cells(p.obstacle_min_m, res);
  const int max_side = std::max(min_side, to_cells(p.obstacle_max_m, res));
  int placed = 0;
  for (int attempt = 0; attempt < p.max_attempts && placed < p.obstacles; ++attempt) {
    const int side = uniform_int(rng, min_side, max_side);
    if (side + 2 >= g.width() - 2 || side + 2 >= g.height() - 2) break;
    const int x0 = uniform_int(rng, 1, g.width() - 1 - side);
    const int y0 = uniform_int(rng, 1, g.height() - 1 - side);
    // Pillars go in open space only, with a free ring around them.
    bool clear = true;
    for (int y = y0 - 1; y <= y0 + side && clear; ++y)
      for (int x = x0 - 1; x <= x0 + side && clear; ++x) clear = g.free(x, y);
    if (!clear) continue;
    OccupancyGrid trial = g;
    for (int y = y0; y < y0 + side; ++y)
      for (int x = x0; x < x0 + side; ++x) trial.set_blocked(x, y, true);
    if (trial.free_components() != 1) continue;
    g = std::move(trial);
    ++placed;
  }
}

}  // namespace

std::string to_string(Layout layout) {
  return layout == Layout::open_room ? "open_room" : "rooms";
}

Layout layout_from_string(const std::string& s) {
  if (s == "open_room" || s == "open") return Layout::open_room;
  if (s == "rooms") return Layout::rooms;
  throw InvalidArgument("unknown layout '" + s + "'");
}

OccupancyGrid generate_world(std::uint64_t seed, const WorldParams& p) {
  if (!(p.resolution > 0.0) || !(p.width_m > 0.0) || !(p.height_m > 0.0))
    throw GenerationError("world size and resolution must be positive");
  const int w = to_cells(p.width_m, p.resolution) + 2;
  const int h = to_cells(p.height_m, p.resolution) + 2;
  if (w < 3 || h < 3) throw GenerationError("world too small");
  if (p.obstacles < 0 || p.rooms < 0) throw GenerationError("counts must be nonnegative");

  Rng rng(mix_seed(seed));
  OccupancyGrid g(w, h, p.resolution, true);

  if (p.layout == Layout::open_room || p.rooms == 0) {
    carve(g, {1, 1, w - 2, h - 2});
  } else {
    const int min_side = to_cells(p.room_min_m, p.resolution);
    const int max_side = std::max(min_side, to_cells(p.room_max_m, p.resolution));
    if (min_side > w - 2 || min_side > h - 2)
      throw GenerationError("room_min_m does not fit inside the world");
    const int corridor = to_cells(p.corridor_width_m, p.resolution);
    std::vector<Rect> rooms;
    for (int attempt = 0; attempt < p.max_attempts * p.rooms &&
                          static_cast<int>(rooms.size()) < p.rooms;
         ++attempt) {
      const int rw = uniform_int(rng, min_side, std::min(max_side, w - 2));
      const int rh = uniform_int(rng, min_side, std::min(max_side, h - 2));
      const int x0 = uniform_int(rng, 1, w - 1 - rw);
      const int y0 = uniform_int(rng, 1, h - 1 - rh);
      const Rect r{x0, y0, x0 + rw - 1, y0 + rh - 1};
      const bool overlap = std::any_of(rooms.begin(), rooms.end(),
                                       [&](const Rect& o) { return r.overlaps(o, 2); });
      if (!overlap) rooms.push_back(r);
    }
    if (static_cast<int>(rooms.size()) < p.rooms)
      throw GenerationError("could not place " + std::to_string(p.rooms) + " rooms");
    for (const Rect& r : rooms) carve(g, r);
    for (std::size_t i = 1; i < rooms.size(); ++i) {
      carve_corridor(g, rooms[i - 1].cx(), rooms[i - 1].cy(), rooms[i].cx(), rooms[i].cy(),
                     corridor, rng.below(2) == 0);
    }
  }

  place_obstacles(g, rng, p);
  g.validate();
  if (g.free_components() != 1) throw GenerationError("free space is not connected");
  return g;
}

}  // namespace wpnav
