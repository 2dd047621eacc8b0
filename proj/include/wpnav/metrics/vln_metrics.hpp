#pragma once

#include <string>
#include <vector>

#include "wpnav/actionspace/actions.hpp"
#include "wpnav/metrics/motion_model.hpp"
#include "wpnav/navigators/commands.hpp"
#include "wpnav/world/episode.hpp"
#include "wpnav/world/grid.hpp"

namespace wpnav {

enum class PlannerKind { rrt_star, lattice_dijkstra };

struct OracleTime {
  double T = 0.0;  // seconds
  PlannerKind planner = PlannerKind::lattice_dijkstra;
};

struct EpisodeResult {
  Episode episode;
  bool success = false;  // STOP issued within success_distance of the goal
  bool stopped = false;
  std::vector<Point> path;
  std::vector<Command> commands;
  Point final_position;
  // One entry per waypoint decision, with the pose it was taken from.
  std::vector<WaypointAction> actions;
  std::vector<Pose> decision_poses;
};

struct MetricsReport {
  double TL = 0.0;
  double NE = 0.0;
  double OS = 0.0;
  double SR = 0.0;
  double SPL = 0.0;
  double EET = 0.0;
  double SCT = 0.0;
  double n_commands = 0.0;
  double speed = 0.0;  // TL / EET, m/s

  friend bool operator==(const MetricsReport&, const MetricsReport&) = default;
};

enum class DistanceMode { geodesic, euclidean };

// TL, NE, OS, SR, SPL; the timing columns are left at zero.
MetricsReport vln_metrics(const EpisodeResult& r, const OccupancyGrid& grid,
                          DistanceMode mode = DistanceMode::geodesic);

// SR * T / max(C, T) with C = EET of the executed commands. Throws
// InvalidArgument when T <= 0.
double sct(const EpisodeResult& r, const OracleTime& t_oracle, const MotionModel& m);

// Full row: VLN metrics plus EET, SCT, command count and speed.
MetricsReport full_report(const EpisodeResult& r, const OccupancyGrid& grid,
                          const OracleTime& t_oracle, const MotionModel& m,
                          DistanceMode mode = DistanceMode::geodesic);

// Issued motion commands (Stop excluded).
int count_commands(const std::vector<Command>& commands);

MetricsReport mean_report(const std::vector<MetricsReport>& rows);

}  // namespace wpnav
