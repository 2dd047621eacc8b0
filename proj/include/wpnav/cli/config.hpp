#pragma once

#include <cstdint>
#include <string>

#include "wpnav/metrics/motion_model.hpp"
#include "wpnav/metrics/planners.hpp"
#include "wpnav/trainer/train.hpp"

namespace wpnav {

inline constexpr const char* kToolVersion = WPNAV_VERSION;

struct ExperimentConfig {
  WorldParams world;
  EpisodeParams episodes;
  PolicyConfig policy;
  NavigatorKind navigator = NavigatorKind::continuous;
  PPOConfig ppo;
  EnvConfig env;
  MotionModel motion;
  LatticeParams oracle{0.4, 24, 4.0};

  std::uint64_t run_seed = 1;
  std::uint64_t train_world_seed = 101;
  std::uint64_t val_world_seed = 202;
  std::uint64_t test_world_seed = 303;
  int train_worlds = 64;
  int val_worlds = 10;
  int val_episodes_per_world = 5;
  int test_worlds = 20;
  int test_episodes_per_world = 10;

  long total_steps = 500000;
  int eval_every = 25;
  int patience = 0;
  double stop_at_val_sr = 2.0;
  int threads = 1;

  std::string output_dir = "runs";

  ExperimentConfig();

  // Full config as JSON with a fixed key order.
  std::string to_json() const;
  // Unknown keys and wrongly typed values raise ParseError; absent keys keep
  // their defaults.
  static ExperimentConfig from_json(const std::string& text);
  static ExperimentConfig load(const std::string& path);

  // Digest of everything except output_dir and threads.
  std::string digest() const;
  // Digest of the inputs that determine generated worlds and episodes.
  std::string world_digest() const;

  TrainConfig train_config() const;
  EnvConfig eval_env(NavigatorKind nav) const;
};

}  // namespace wpnav
