#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <queue>
#include <tuple>

#include "wpnav/common/angles.hpp"
#include "wpnav/metrics/planners.hpp"
#include "wpnav/world/sensing.hpp"

namespace wpnav {

double edge_time(const MotionModel& m, Point from, double heading, Point to) {
  const Point d = to - from;
  const double len = norm(d);
  if (len == 0.0) return 0.0;
  const double turn = std::abs(rad2deg(wrap_pi(std::atan2(d.y, d.x) - heading)));
  return m.rotate_time(turn) + m.translate_time(len);
}

LatticePlan lattice_plan(const OccupancyGrid& grid, const Pose& start, Point goal,
                         const MotionModel& m, const LatticeParams& params) {
  require_free_pose(grid, start);
  require_free_point(grid, goal);
  LatticePlan plan;
  if (grid.cell_at(start.position()) == grid.cell_at(goal)) {
    plan.T = 0.0;
    plan.path = {start.position(), goal};
    return plan;
  }
  if (params.heading_bins < 1) throw InvalidArgument("heading_bins must be >= 1");

  const int stride = params.node_spacing > 0.0
                         ? std::max(1, static_cast<int>(std::lround(params.node_spacing /
                                                                    grid.resolution())))
                         : 1;
  std::vector<Point> nodes{start.position(), goal};
  for (int cy = 1; cy < grid.height(); cy += stride)
    for (int cx = 1; cx < grid.width(); cx += stride)
      if (grid.free(cx, cy)) nodes.push_back(grid.cell_center({cx, cy}));
  const int start_id = 0;
  const int goal_id = 1;

  const double reach = params.max_edge + 1e-9;
  std::vector<std::vector<int>> neighbours(nodes.size());
  std::vector<char> expanded(nodes.size(), 0);
  auto neighbours_of = [&](int i) -> const std::vector<int>& {
    if (!expanded[static_cast<std::size_t>(i)]) {
      expanded[static_cast<std::size_t>(i)] = 1;
      auto& list = neighbours[static_cast<std::size_t>(i)];
      const Point p = nodes[static_cast<std::size_t>(i)];
      for (std::size_t j = 0; j < nodes.size(); ++j) {
        if (static_cast<int>(j) == i || static_cast<int>(j) == start_id) continue;
        const Point q = nodes[j];
        if (std::abs(q.x - p.x) > reach || std::abs(q.y - p.y) > reach) continue;
        // Coincident nodes would allow a free heading change.
        const double len = distance(p, q);
        if (len > reach || len < 1e-9) continue;
        if (segment_clear(grid, p, q)) list.push_back(static_cast<int>(j));
      }
    }
    return neighbours[static_cast<std::size_t>(i)];
  };

  const int bins = params.heading_bins;
  auto bin_of = [&](double heading) {
    const int b = static_cast<int>(std::floor(wrap_2pi(heading) / kTwoPi * bins));
    return std::clamp(b, 0, bins - 1);
  };
  const std::size_t n_states = nodes.size() * static_cast<std::size_t>(bins);
  std::vector<double> cost(n_states, LatticePlan::kInfinity);
  std::vector<double> heading(n_states, 0.0);
  std::vector<int> parent(n_states, -1);
  auto sid = [&](int node, int bin) {
    return static_cast<std::size_t>(node) * static_cast<std::size_t>(bins) +
           static_cast<std::size_t>(bin);
  };

  using Entry = std::tuple<double, std::size_t>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<Entry>> open;
  const std::size_t s0 = sid(start_id, bin_of(start.heading));
  cost[s0] = 0.0;
  heading[s0] = start.heading;
  open.emplace(0.0, s0);
  std::size_t reached = n_states;
  while (!open.empty()) {
    const auto [c, s] = open.top();
    open.pop();
    if (c > cost[s]) continue;
    const int node = static_cast<int>(s / static_cast<std::size_t>(bins));
    if (node == goal_id) {
      reached = s;
      break;
    }
    const Point p = nodes[static_cast<std::size_t>(node)];
    for (int nb : neighbours_of(node)) {
      const Point q = nodes[static_cast<std::size_t>(nb)];
      const double bearing = std::atan2(q.y - p.y, q.x - p.x);
      const double nc = c + edge_time(m, p, heading[s], q);
      const std::size_t t = sid(nb, bin_of(bearing));
      if (nc < cost[t]) {
        cost[t] = nc;
        heading[t] = bearing;
        parent[t] = static_cast<int>(s);
        open.emplace(nc, t);
      }
    }
  }
  if (reached == n_states) return plan;
  plan.T = cost[reached];
  for (int s = static_cast<int>(reached); s >= 0; s = parent[static_cast<std::size_t>(s)])
    plan.path.push_back(nodes[static_cast<std::size_t>(s) / static_cast<std::size_t>(bins)]);
  std::reverse(plan.path.begin(), plan.path.end());
  return plan;
}

OracleTime minimal_time_lattice(const OccupancyGrid& grid, const Pose& start, Point goal,
                                const MotionModel& m, const LatticeParams& params) {
  const LatticePlan plan = lattice_plan(grid, start, goal, m, params);
  return {plan.T >= LatticePlan::kInfinity ? std::numeric_limits<double>::infinity() : plan.T,
          PlannerKind::lattice_dijkstra};
}

}  // namespace wpnav
