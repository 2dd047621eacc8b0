#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "wpnav/policy/policy.hpp"
#include "wpnav/trainer/env.hpp"
#include "wpnav/trainer/ppo.hpp"
#include "wpnav/world/generator.hpp"
#include "wpnav/world/world_io.hpp"

namespace wpnav {

struct TrainConfig {
  PPOConfig ppo;
  PolicyConfig policy;
  EnvConfig env;
  WorldParams world;
  EpisodeParams episodes;
  std::uint64_t seed = 1;              // run seed: init, env streams, minibatch order
  std::uint64_t train_world_seed = 1;  // training worlds derive from this
  std::uint64_t val_world_seed = 2;    // held-out validation worlds
  int train_worlds = 64;
  int val_worlds = 10;
  int val_episodes_per_world = 5;
  long total_steps = 500000;  // waypoint decisions across all envs
  int eval_every = 25;        // updates between validation passes
  int patience = 0;           // validation passes without SPL gain before stopping; 0 = never
  double stop_at_val_sr = 2.0;  // stop once validation SR reaches this (> 1 disables)
  int threads = 1;
  std::string out_dir;      // empty: no files written
  std::string log_comment;  // written as a leading "# ..." line of train_log.csv
};

struct TrainRun {
  long step = 0;
  int updates = 0;
  int checkpoint_index = 0;
  double best_spl = -1.0;
  double best_sr = 0.0;
  long best_step = 0;
  std::vector<std::uint64_t> env_seeds;
};

struct TrainResult {
  TrainRun run;
  Policy best;
  Policy last;
  std::string log_csv;
};

// Worlds from consecutive derived seeds; each carries `episodes` episodes.
std::vector<WorldFile> make_world_set(std::uint64_t base_seed, int count, const WorldParams& world,
                                      const EpisodeParams& episodes, int episodes_per_world,
                                      const std::string& id_prefix);

// collect -> GAE -> PPO epochs, with periodic greedy validation and
// best-SPL checkpointing. With out_dir set, writes train_log.csv,
// best.ckpt and latest.ckpt there. Throws NumericError on a non-finite loss
// after the latest checkpoint has been written.
using TrainProgress = std::function<void(const TrainRun&, const std::string& log_line)>;
TrainResult train(const TrainConfig& cfg, const TrainProgress& progress = {});

inline const char* kTrainLogHeader =
    "update,step,loss_total,loss_action,loss_value,entropy_pano,entropy_offset,"
    "entropy_distance,loss_offset,grad_norm,mean_distance,train_sr,eval_spl,eval_sr";

}  // namespace wpnav
