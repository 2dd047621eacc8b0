#pragma once

#include <cstdint>
#include <vector>

#include "wpnav/common/error.hpp"
#include "wpnav/metrics/motion_model.hpp"
#include "wpnav/metrics/vln_metrics.hpp"
#include "wpnav/world/grid.hpp"

namespace wpnav {

// Both planners search point-turn paths: each edge is a rotation to the
// segment bearing followed by a straight translation of at most max_edge
// meters through free space. Edge cost comes from the motion model; the
// final heading at the goal is free.

struct LatticeParams {
  double node_spacing = 0.0;  // meters; 0 uses the grid resolution
  int heading_bins = 36;
  double max_edge = 4.0;
};

struct LatticePlan {
  double T = kInfinity;
  std::vector<Point> path;  // start ... goal
  static constexpr double kInfinity = 1e300;
};

// Dijkstra over (lattice node, heading bin) states. Each state keeps the exact
// arrival heading of the path that settled it, so the reported time is the
// exact motion-model cost of the returned polyline. Unreachable goals give
// T = +infinity.
LatticePlan lattice_plan(const OccupancyGrid& grid, const Pose& start, Point goal,
                         const MotionModel& m, const LatticeParams& params = {});
OracleTime minimal_time_lattice(const OccupancyGrid& grid, const Pose& start, Point goal,
                                const MotionModel& m, const LatticeParams& params = {});

struct RrtParams {
  int iterations = 3000;
  double max_edge = 4.0;
  double goal_bias = 0.1;
};

struct RrtResult {
  double T = 0.0;
  std::vector<Point> path;
  std::vector<double> best_history;  // best goal cost after each iteration
  int nodes = 0;
};

class PlannerIncomplete : public Error {
 public:
  PlannerIncomplete(const std::string& what, double best_partial)
      : Error(what), best_partial_(best_partial) {}
  // Cost-to-come of the tree node closest to the goal.
  double best_partial() const { return best_partial_; }

 private:
  double best_partial_;
};

// RRT* over poses with motion-model edge costs and rewiring. New samples are
// free points at most max_edge from the tree; nearest-node selection uses
// the closest node with line of sight (where geodesic and straight-line
// distance coincide). Throws PlannerIncomplete if the goal is never connected.
RrtResult rrt_plan(const OccupancyGrid& grid, const Pose& start, Point goal,
                   const MotionModel& m, std::uint64_t seed, const RrtParams& params = {});
OracleTime minimal_time_rrt(const OccupancyGrid& grid, const Pose& start, Point goal,
                            const MotionModel& m, std::uint64_t seed,
                            const RrtParams& params = {});

// Motion-model cost of a single edge leaving `from` with the given heading.
double edge_time(const MotionModel& m, Point from, double heading, Point to);

}  // namespace wpnav
