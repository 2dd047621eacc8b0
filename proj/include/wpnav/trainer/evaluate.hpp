#pragma once

#include <vector>

#include "wpnav/metrics/planners.hpp"
#include "wpnav/metrics/vln_metrics.hpp"
#include "wpnav/policy/policy.hpp"
#include "wpnav/trainer/env.hpp"
#include "wpnav/world/world_io.hpp"

namespace wpnav {

// Greedy rollout: the mode of every action distribution at each decision.
EpisodeResult run_episode(const Policy& policy, const OccupancyGrid& grid, const Episode& episode,
                          const EnvConfig& cfg);

struct EvalItem {
  const OccupancyGrid* grid = nullptr;
  const Episode* episode = nullptr;
};

// World-major, episode-minor order.
std::vector<EvalItem> flatten(const std::vector<WorldFile>& worlds);

// Episodes are independent; with threads > 1 they run concurrently and the
// results keep the input order.
std::vector<EpisodeResult> evaluate_policy(const Policy& policy, const std::vector<EvalItem>& items,
                                           const EnvConfig& cfg, int threads = 1);

// Lattice minimal time per episode from its start pose.
std::vector<OracleTime> oracle_times(const std::vector<EvalItem>& items, const MotionModel& m,
                                     const LatticeParams& params, int threads = 1);

// One full metrics row per episode. SCT is 0 without a positive oracle time.
std::vector<MetricsReport> score(const std::vector<EvalItem>& items,
                                 const std::vector<EpisodeResult>& results, const MotionModel& m,
                                 const std::vector<OracleTime>* oracle = nullptr);

}  // namespace wpnav
