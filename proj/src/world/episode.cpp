#include "wpnav/world/episode.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "wpnav/common/angles.hpp"
#include "wpnav/common/error.hpp"
#include "wpnav/common/rng.hpp"
#include "wpnav/world/geodesic.hpp"
#include "wpnav/world/sensing.hpp"

namespace wpnav {
namespace {

constexpr std::array<std::string_view, Vocabulary::kCount> kWords = {
    "go", "forward", "turn", "left", "right", "slight", "around", "then", "stop"};

bool has_clearance(const OccupancyGrid& grid, Cell c, int radius) {
  for (int dy = -radius; dy <= radius; ++dy)
    for (int dx = -radius; dx <= radius; ++dx)
      if (grid.blocked(c.cx + dx, c.cy + dy)) return false;
  return true;
}

}  // namespace

std::string_view Vocabulary::word(int id) {
  if (!valid(id)) return "<unk>";
  return kWords[static_cast<std::size_t>(id)];
}

int Vocabulary::id(std::string_view w) {
  for (int i = 0; i < kCount; ++i)
    if (kWords[static_cast<std::size_t>(i)] == w) return i;
  return -1;
}

std::string Vocabulary::render(const std::vector<int>& tokens) {
  std::string out;
  for (int t : tokens) {
    if (!out.empty()) out += ' ';
    out += word(t);
  }
  return out;
}

std::vector<Point> simplify_path(const OccupancyGrid& grid, const std::vector<Point>& path) {
  if (path.size() <= 2) return path;
  std::vector<Point> out{path.front()};
  std::size_t anchor = 0;
  while (anchor + 1 < path.size()) {
    std::size_t next = anchor + 1;
    for (std::size_t j = path.size() - 1; j > anchor + 1; --j) {
      if (segment_clear(grid, path[anchor], path[j])) {
        next = j;
        break;
      }
    }
    out.push_back(path[next]);
    anchor = next;
  }
  return out;
}

std::vector<int> instruction_for_path(const OccupancyGrid& grid,
                                      const std::vector<Point>& path) {
  using V = Vocabulary;
  std::vector<int> tokens{V::kGo, V::kForward};
  const std::vector<Point> simple = simplify_path(grid, path);
  std::vector<double> headings;
  for (std::size_t i = 1; i < simple.size(); ++i) {
    const Point d = simple[i] - simple[i - 1];
    if (norm(d) > 0.0) headings.push_back(std::atan2(d.y, d.x));
  }
  double current = headings.empty() ? 0.0 : headings.front();
  for (std::size_t i = 1; i < headings.size(); ++i) {
    const double delta = rad2deg(wrap_pi(headings[i] - current));
    const double mag = std::abs(delta);
    if (mag < 20.0) continue;  // absorbed into the current leg
    current = headings[i];
    tokens.push_back(V::kThen);
    tokens.push_back(V::kTurn);
    if (mag >= 135.0) {
      tokens.push_back(V::kAround);
    } else {
      if (mag < 60.0) tokens.push_back(V::kSlight);
      tokens.push_back(delta > 0.0 ? V::kLeft : V::kRight);
    }
    tokens.push_back(V::kThen);
    tokens.push_back(V::kGo);
    tokens.push_back(V::kForward);
  }
  tokens.push_back(V::kThen);
  tokens.push_back(V::kStop);
  return tokens;
}

Episode generate_episode(const OccupancyGrid& grid, std::uint64_t seed,
                         const EpisodeParams& params, std::string id) {
  if (!(params.min_geodesic_m <= params.max_geodesic_m))
    throw InvalidArgument("episode geodesic bounds are inverted");
  Rng rng(mix_seed(seed ^ 0x5eedULL));
  const int clearance =
      static_cast<int>(std::ceil(params.clearance_m / grid.resolution() - 1e-9));

  std::vector<std::size_t> candidates;
  for (std::size_t i = 0; i < grid.raw().size(); ++i) {
    const Cell c = grid.cell_of_index(i);
    if (grid.free(c) && has_clearance(grid, c, clearance)) candidates.push_back(i);
  }
  if (candidates.size() < 2) throw SamplingError("not enough free cells for an episode");

  constexpr int kGoalsPerStart = 16;
  for (int attempt = 0; attempt < params.max_retries; ++attempt) {
    const Cell start_cell = grid.cell_of_index(candidates[rng.below(candidates.size())]);
    const Point start = grid.cell_center(start_cell);
    const DistanceField field(grid, start);
    for (int g = 0; g < kGoalsPerStart; ++g) {
      const Cell goal_cell = grid.cell_of_index(candidates[rng.below(candidates.size())]);
      if (goal_cell == start_cell) continue;
      const double d = field.at(goal_cell);
      if (d < params.min_geodesic_m || d > params.max_geodesic_m) continue;
      Episode ep;
      ep.id = std::move(id);
      ep.start = {start.x, start.y, wrap_2pi(rng.uniform(0.0, kTwoPi))};
      ep.goal = grid.cell_center(goal_cell);
      ep.shortest_path = field.path_from(ep.goal);
      std::reverse(ep.shortest_path.begin(), ep.shortest_path.end());
      ep.geodesic_length = polyline_length(ep.shortest_path);
      ep.instruction = instruction_for_path(grid, ep.shortest_path);
      ep.success_distance = params.success_distance;
      return ep;
    }
  }
  throw SamplingError("no start/goal pair within geodesic bounds after " +
                      std::to_string(params.max_retries) + " retries");
}

}  // namespace wpnav
