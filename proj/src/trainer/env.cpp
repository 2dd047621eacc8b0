#include "wpnav/trainer/env.hpp"

#include <cmath>

#include "wpnav/common/error.hpp"

namespace wpnav {

double step_reward(double prev_geo, double new_geo, const WaypointAction& action, bool stopped,
                   bool at_goal, const RewardConfig& cfg) {
  double r = prev_geo - new_geo;
  if (stopped) {
    if (at_goal) r += cfg.r_success;
  } else {
    r += cfg.slack_scalar * action.distance / 0.25;
  }
  return r;
}

NavEnv::NavEnv(const OccupancyGrid& grid, const Episode& episode, const PolicyConfig& policy_cfg,
               const EnvConfig& cfg)
    : grid_(&grid),
      policy_cfg_(policy_cfg),
      cfg_(cfg),
      field_(std::make_shared<DistanceField>(grid, episode.goal)),
      pose_(episode.start) {
  require_free_pose(grid, episode.start);
  require_free_point(grid, episode.goal);
  result_.episode = episode;
  result_.path.push_back(pose_.position());
  result_.final_position = pose_.position();
}

double NavEnv::geodesic_to_goal() const { return field_->at(pose_.position()); }

Observation NavEnv::observe() const {
  const RangeScan scan = panorama_scan(*grid_, pose_, cfg_.scan);
  std::optional<GoalCue> cue;
  if (policy_cfg_.goal_cue) {
    const Point d = result_.episode.goal - pose_.position();
    cue = GoalCue{norm(d), wrap_2pi(std::atan2(d.y, d.x) - pose_.heading)};
  }
  return make_observation(policy_cfg_, scan, result_.episode.instruction, cue);
}

StepResult NavEnv::step(const WaypointAction& action) {
  if (done_) throw InvalidArgument("step on a finished episode");
  StepResult s;
  const double prev = geodesic_to_goal();
  result_.actions.push_back(action);
  result_.decision_poses.push_back(pose_);
  ++steps_;
  if (action.is_stop()) {
    const bool at_goal = prev <= result_.episode.success_distance;
    result_.commands.push_back(Command::stop());
    result_.stopped = true;
    result_.success = at_goal;
    s.reward = step_reward(prev, prev, action, true, at_goal, cfg_.reward);
    s.success = at_goal;
    done_ = true;
  } else {
    const NavigationOutcome nav =
        navigate(cfg_.navigator, *grid_, pose_, compose_waypoint(action));
    pose_ = nav.final_pose;
    result_.commands.insert(result_.commands.end(), nav.commands.begin(), nav.commands.end());
    for (std::size_t i = 1; i < nav.path.size(); ++i) result_.path.push_back(nav.path[i]);
    const double now = geodesic_to_goal();
    s.reward = step_reward(prev, now, action, false, false, cfg_.reward);
    if (steps_ >= cfg_.max_steps) done_ = true;
  }
  result_.final_position = pose_.position();
  s.done = done_;
  s.geodesic_to_goal = geodesic_to_goal();
  return s;
}

EpisodeSampler::EpisodeSampler(std::shared_ptr<const std::vector<OccupancyGrid>> worlds,
                               EpisodeParams params, std::uint64_t seed)
    : worlds_(std::move(worlds)), params_(params), rng_(seed) {
  if (!worlds_ || worlds_->empty()) throw InvalidArgument("episode sampler needs worlds");
}

std::pair<std::size_t, Episode> EpisodeSampler::next() {
  const std::size_t w = rng_.below(worlds_->size());
  const std::uint64_t seed = rng_.next_u64();
  return {w, generate_episode((*worlds_)[w], seed, params_, "train-" + std::to_string(count_++))};
}

}  // namespace wpnav
