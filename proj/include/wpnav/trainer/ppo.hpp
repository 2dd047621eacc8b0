#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "wpnav/policy/head_ops.hpp"
#include "wpnav/policy/policy.hpp"
#include "wpnav/trainer/env.hpp"

namespace wpnav {

struct PPOConfig {
  int n_envs = 4;
  int rollout_length = 16;
  int ppo_epochs = 2;
  int minibatches = 4;
  double learning_rate = 2.0e-4;
  double adam_epsilon = 1.0e-5;
  double clip = 0.2;
  bool value_clip = true;
  double gamma = 0.99;
  double tau = 0.95;
  double c_v = 0.5;
  double c_r = 0.1146;
  double c_e = 0.1;
  double c_p = 1.5;
  double c_o = 1.0;
  double c_d = 1.0;
  double max_grad_norm = 0.2;
  double r_success = 2.5;
  double success_distance = 3.0;
  double slack_scalar = -0.05;
  double advantage_epsilon = 1e-8;
  bool normalize_advantages = true;
};

struct GaeResult {
  std::vector<double> advantages;
  std::vector<double> returns;
};

// A_t = delta_t + gamma tau (1 - done_t) A_{t+1},
// delta_t = r_t + gamma (1 - done_t) V_{t+1} - V_t, with V_T = bootstrap.
// done_t marks an episode that ended with step t. Returns = A + V.
GaeResult gae(const std::vector<double>& rewards, const std::vector<double>& values,
              const std::vector<bool>& dones, double bootstrap, double gamma, double tau);

// Zero mean, unit variance (population), epsilon-guarded.
void normalize(std::vector<double>& v, double epsilon);

struct Transition {
  Observation obs;
  PolicyState state;  // recurrent state at step start
  WaypointAction action;
  double offset_uniform = 0.5;  // uniform that produced a continuous offset
  double logprob = 0.0;
  double value = 0.0;
  double reward = 0.0;
  bool done = false;
  double advantage = 0.0;
  double ret = 0.0;
};

struct RolloutBuffer {
  int n_envs = 0;
  int length = 0;
  std::vector<std::vector<Transition>> steps;  // [env][t]
  std::vector<double> bootstrap;               // value after the last step, per env

  std::size_t size() const { return static_cast<std::size_t>(n_envs) * static_cast<std::size_t>(length); }
};

// Samples an action from the heads; the offset uniform is reported so the
// draw can be reparameterized later.
WaypointAction sample_waypoint(const HeadOutputs& h, Rng& rng, double* offset_uniform);

// One logical rollout worker: an environment, its recurrent state and RNG.
struct RolloutWorker {
  std::shared_ptr<EpisodeSampler> sampler;
  std::shared_ptr<const std::vector<OccupancyGrid>> worlds;
  EnvConfig env_cfg;
  std::unique_ptr<NavEnv> env;
  PolicyState state;
  Rng rng;
  // Completed-episode statistics since the last drain.
  int episodes = 0;
  int successes = 0;

  void reset(const PolicyConfig& pcfg);
};

std::vector<RolloutWorker> make_workers(std::shared_ptr<const std::vector<OccupancyGrid>> worlds,
                                        const EpisodeParams& episodes, const EnvConfig& env_cfg,
                                        const PolicyConfig& pcfg, int n_envs,
                                        std::uint64_t run_seed);

// Steps every worker rollout_length times with the policy snapshot. With
// threads > 1 workers run concurrently; the buffer is ordered by env index
// so the result does not depend on scheduling.
RolloutBuffer collect_rollouts(std::vector<RolloutWorker>& workers, const Policy& policy,
                               const PPOConfig& cfg, int threads = 1);

// GAE per env, then advantage normalization over the whole buffer.
void compute_advantages(RolloutBuffer& buf, const PPOConfig& cfg);

struct LossTerms {
  double action = 0.0;
  double value = 0.0;
  double entropy_pano = 0.0;
  double entropy_offset = 0.0;
  double entropy_distance = 0.0;
  double entropy = 0.0;  // c_p S_pano + c_o S_offset + c_d S_dist
  double offset = 0.0;
  double total = 0.0;
  double grad_norm = 0.0;  // before clipping
};

// Replays the given env sequences with BPTT from their stored start states,
// records L_total on the tape and returns its terms. The loss variable is
// returned through `loss` for backward().
LossTerms ppo_losses(Tape& t, const Policy& policy, const RolloutBuffer& buf,
                     const std::vector<int>& envs, const PPOConfig& cfg, Var* loss,
                     std::vector<double>* replayed_logprobs = nullptr);

// ppo_epochs passes of minibatch updates (minibatches partition the envs).
// Throws NumericError on a non-finite loss. Returns the mean loss terms.
LossTerms ppo_update(Policy& policy, Adam& adam, const RolloutBuffer& buf,
                     const PPOConfig& cfg, Rng& rng);

}  // namespace wpnav
