#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "wpnav/metrics/vln_metrics.hpp"
#include "wpnav/navigators/navigators.hpp"
#include "wpnav/policy/policy.hpp"
#include "wpnav/world/episode.hpp"
#include "wpnav/world/geodesic.hpp"
#include "wpnav/world/sensing.hpp"

namespace wpnav {

struct RewardConfig {
  double r_success = 2.5;
  double slack_scalar = -0.05;
};

// r = [STOP within success distance] * r_success + (prev_geo - new_geo)
//     + slack_scalar * d / 0.25 for motion actions (STOP pays no slack).
double step_reward(double prev_geo, double new_geo, const WaypointAction& action, bool stopped,
                   bool at_goal, const RewardConfig& cfg);

struct EnvConfig {
  int max_steps = 20;  // waypoint decisions per episode
  NavigatorKind navigator = NavigatorKind::continuous;
  ScanParams scan;
  RewardConfig reward;
};

struct StepResult {
  double reward = 0.0;
  bool done = false;
  bool success = false;
  double geodesic_to_goal = 0.0;
};

// One navigation episode at waypoint granularity. The environment owns the
// episode record (path, commands, decisions) used for metrics.
class NavEnv {
 public:
  NavEnv(const OccupancyGrid& grid, const Episode& episode, const PolicyConfig& policy_cfg,
         const EnvConfig& cfg);

  Observation observe() const;
  StepResult step(const WaypointAction& action);

  bool done() const { return done_; }
  const Pose& pose() const { return pose_; }
  double geodesic_to_goal() const;
  const EpisodeResult& result() const { return result_; }
  const Episode& episode() const { return result_.episode; }
  const OccupancyGrid& grid() const { return *grid_; }

 private:
  const OccupancyGrid* grid_;
  PolicyConfig policy_cfg_;
  EnvConfig cfg_;
  std::shared_ptr<const DistanceField> field_;
  Pose pose_;
  int steps_ = 0;
  bool done_ = false;
  EpisodeResult result_;
};

// Training environment: draws a fresh episode on a random training world at
// every reset.
class EpisodeSampler {
 public:
  EpisodeSampler(std::shared_ptr<const std::vector<OccupancyGrid>> worlds, EpisodeParams params,
                 std::uint64_t seed);
  // Returns the world index and the episode.
  std::pair<std::size_t, Episode> next();

 private:
  std::shared_ptr<const std::vector<OccupancyGrid>> worlds_;
  EpisodeParams params_;
  Rng rng_;
  std::uint64_t count_ = 0;
};

}  // namespace wpnav
