#include <algorithm>
#include <cmath>
#include <limits>

#include "wpnav/common/angles.hpp"
#include "wpnav/common/rng.hpp"
#include "wpnav/metrics/planners.hpp"
#include "wpnav/world/sensing.hpp"

namespace wpnav {
namespace {

struct Node {
  Point p;
  double heading = 0.0;  // arrival heading; the root keeps the start heading
  double cost = 0.0;
  int parent = -1;
  std::vector<int> children;
};

class Tree {
 public:
  Tree(const OccupancyGrid& grid, const MotionModel& m, const RrtParams& params, Point goal)
      : grid_(grid), m_(m), params_(params), goal_(goal) {}

  std::vector<Node> nodes;
  std::vector<int> goal_links;  // nodes with a direct edge to the goal

  double best_goal_cost(int* via) const {
    double best = std::numeric_limits<double>::infinity();
    for (int i : goal_links) {
      const Node& n = nodes[static_cast<std::size_t>(i)];
      const double c = n.cost + edge_time(m_, n.p, n.heading, goal_);
      if (c < best) {
        best = c;
        if (via) *via = i;
      }
    }
    return best;
  }

  void add_node(Point p, int parent, double cost) {
    const Node& par = nodes[static_cast<std::size_t>(parent)];
    Node n;
    n.p = p;
    n.heading = std::atan2(p.y - par.p.y, p.x - par.p.x);
    n.cost = cost;
    n.parent = parent;
    const int id = static_cast<int>(nodes.size());
    nodes[static_cast<std::size_t>(parent)].children.push_back(id);
    nodes.push_back(std::move(n));
    link_goal(id);
  }

  void link_goal(int id) {
    const Point p = nodes[static_cast<std::size_t>(id)].p;
    if (distance(p, goal_) <= params_.max_edge + 1e-9 && segment_clear(grid_, p, goal_))
      goal_links.push_back(id);
  }

  double cost_via(int parent, Point p) const {
    const Node& par = nodes[static_cast<std::size_t>(parent)];
    return par.cost + edge_time(m_, par.p, par.heading, p);
  }

  void reparent(int child, int new_parent, double new_cost) {
    Node& c = nodes[static_cast<std::size_t>(child)];
    auto& siblings = nodes[static_cast<std::size_t>(c.parent)].children;
    siblings.erase(std::find(siblings.begin(), siblings.end(), child));
    c.parent = new_parent;
    const Point pp = nodes[static_cast<std::size_t>(new_parent)].p;
    c.heading = std::atan2(c.p.y - pp.y, c.p.x - pp.x);
    c.cost = new_cost;
    nodes[static_cast<std::size_t>(new_parent)].children.push_back(child);
    propagate(child);
  }

 private:
  // Descendant costs depend on the arrival heading and cost of their parent.
  void propagate(int root) {
    std::vector<int> stack{root};
    while (!stack.empty()) {
      const int i = stack.back();
      stack.pop_back();
      const Node& n = nodes[static_cast<std::size_t>(i)];
      for (int c : n.children) {
        Node& ch = nodes[static_cast<std::size_t>(c)];
        ch.cost = n.cost + edge_time(m_, n.p, n.heading, ch.p);
        stack.push_back(c);
      }
    }
  }

  const OccupancyGrid& grid_;
  const MotionModel& m_;
  const RrtParams& params_;
  Point goal_;
};

}  // namespace

RrtResult rrt_plan(const OccupancyGrid& grid, const Pose& start, Point goal, const MotionModel& m,
                   std::uint64_t seed, const RrtParams& params) {
  require_free_pose(grid, start);
  require_free_point(grid, goal);
  if (params.iterations < 0 || params.max_edge <= 0.0)
    throw InvalidArgument("invalid RRT* parameters");
  RrtResult result;
  if (grid.cell_at(start.position()) == grid.cell_at(goal)) {
    result.path = {start.position(), goal};
    result.nodes = 1;
    return result;
  }

  std::vector<std::size_t> free_cells;
  for (std::size_t i = 0; i < grid.raw().size(); ++i)
    if (grid.raw()[i] == 0) free_cells.push_back(i);

  Tree tree(grid, m, params, goal);
  Node root;
  root.p = start.position();
  root.heading = start.heading;
  tree.nodes.push_back(root);
  tree.link_goal(0);

  Rng rng(seed);
  const double reach = params.max_edge + 1e-9;
  std::vector<std::pair<double, int>> order;
  std::vector<int> near;
  for (int it = 0; it < params.iterations; ++it) {
    Point x;
    if (rng.uniform() < params.goal_bias) {
      x = goal;
    } else {
      const Cell c = grid.cell_of_index(free_cells[rng.below(free_cells.size())]);
      x = {(c.cx + rng.uniform()) * grid.resolution(), (c.cy + rng.uniform()) * grid.resolution()};
    }

    // Nearest node that sees x; among visible nodes the straight-line and
    // geodesic distances agree.
    order.clear();
    for (std::size_t i = 0; i < tree.nodes.size(); ++i)
      order.emplace_back(distance(tree.nodes[i].p, x), static_cast<int>(i));
    std::sort(order.begin(), order.end());
    int nearest = -1;
    for (const auto& [d, i] : order) {
      if (segment_clear(grid, tree.nodes[static_cast<std::size_t>(i)].p, x)) {
        nearest = i;
        break;
      }
    }
    if (nearest < 0) nearest = order.front().second;
    const Point from = tree.nodes[static_cast<std::size_t>(nearest)].p;
    const double d = distance(from, x);
    if (d > params.max_edge) x = from + (params.max_edge / d) * (x - from);
    if (!grid.is_free_point(x) || !segment_clear(grid, from, x) || distance(from, x) < 1e-9) {
      result.best_history.push_back(tree.best_goal_cost(nullptr));
      continue;
    }

    near.clear();
    for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
      const Point q = tree.nodes[i].p;
      if (distance(q, x) <= reach && segment_clear(grid, q, x)) near.push_back(static_cast<int>(i));
    }
    int parent = nearest;
    double best = tree.cost_via(nearest, x);
    for (int i : near) {
      const double c = tree.cost_via(i, x);
      if (c < best) {
        best = c;
        parent = i;
      }
    }
    tree.add_node(x, parent, best);
    const int id = static_cast<int>(tree.nodes.size()) - 1;

    for (int i : near) {
      if (i == parent || i == 0) continue;
      const double c = tree.cost_via(id, tree.nodes[static_cast<std::size_t>(i)].p);
      if (c < tree.nodes[static_cast<std::size_t>(i)].cost) {
        // A node must not become the descendant of itself.
        bool cycle = false;
        for (int a = id; a >= 0; a = tree.nodes[static_cast<std::size_t>(a)].parent)
          if (a == i) {
            cycle = true;
            break;
          }
        if (!cycle) tree.reparent(i, id, c);
      }
    }
    result.best_history.push_back(tree.best_goal_cost(nullptr));
  }

  // Rewiring only lowers costs, so the history is already monotone; the
  // running minimum guards against floating-point noise in propagation.
  for (std::size_t i = 1; i < result.best_history.size(); ++i)
    result.best_history[i] = std::min(result.best_history[i], result.best_history[i - 1]);

  int via = -1;
  const double best = tree.best_goal_cost(&via);
  result.nodes = static_cast<int>(tree.nodes.size());
  if (via < 0) {
    double closest = std::numeric_limits<double>::infinity();
    double partial = 0.0;
    for (const Node& n : tree.nodes) {
      const double dg = distance(n.p, goal);
      if (dg < closest) {
        closest = dg;
        partial = n.cost;
      }
    }
    throw PlannerIncomplete("RRT* did not connect the goal", partial);
  }
  result.T = best;
  result.path.push_back(goal);
  for (int i = via; i >= 0; i = tree.nodes[static_cast<std::size_t>(i)].parent)
    result.path.push_back(tree.nodes[static_cast<std::size_t>(i)].p);
  std::reverse(result.path.begin(), result.path.end());
  return result;
}

OracleTime minimal_time_rrt(const OccupancyGrid& grid, const Pose& start, Point goal,
                            const MotionModel& m, std::uint64_t seed, const RrtParams& params) {
  return {rrt_plan(grid, start, goal, m, seed, params).T, PlannerKind::rrt_star};
}

}  // namespace wpnav
