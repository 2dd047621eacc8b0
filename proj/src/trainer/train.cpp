#include "wpnav/trainer/train.hpp"

#include <filesystem>
#include <fstream>
#include <memory>
#include <set>

#include "wpnav/common/digest.hpp"
#include "wpnav/common/error.hpp"
#include "wpnav/policy/checkpoint.hpp"
#include "wpnav/trainer/evaluate.hpp"

namespace wpnav {

std::vector<WorldFile> make_world_set(std::uint64_t base_seed, int count, const WorldParams& world,
                                      const EpisodeParams& episodes, int episodes_per_world,
                                      const std::string& id_prefix) {
  std::vector<WorldFile> out;
  for (int i = 0; i < count; ++i) {
    const std::uint64_t seed = derive_seed(base_seed, static_cast<std::uint64_t>(i));
    WorldFile wf;
    wf.grid = generate_world(seed, world);
    wf.meta["seed"] = std::to_string(seed);
    for (int e = 0; e < episodes_per_world; ++e)
      wf.episodes.push_back(generate_episode(wf.grid, derive_seed(seed, static_cast<std::uint64_t>(e)),
                                             episodes,
                                             id_prefix + std::to_string(i) + "-" + std::to_string(e)));
    out.push_back(std::move(wf));
  }
  return out;
}

namespace {

std::string fmt(double v) { return format_double(v); }

}  // namespace

TrainResult train(const TrainConfig& cfg, const TrainProgress& progress) {
  const PPOConfig& ppo = cfg.ppo;
  if (ppo.n_envs < 1 || ppo.rollout_length < 1 || ppo.ppo_epochs < 1 || ppo.minibatches < 1)
    throw InvalidArgument("invalid PPO sizes");

  std::set<std::uint64_t> train_seeds;
  for (int i = 0; i < cfg.train_worlds; ++i)
    train_seeds.insert(derive_seed(cfg.train_world_seed, static_cast<std::uint64_t>(i)));
  for (int i = 0; i < cfg.val_worlds; ++i)
    if (train_seeds.count(derive_seed(cfg.val_world_seed, static_cast<std::uint64_t>(i))))
      throw InvalidArgument("training and validation world seeds overlap");

  EpisodeParams episodes = cfg.episodes;
  episodes.success_distance = ppo.success_distance;
  EnvConfig env_cfg = cfg.env;
  env_cfg.reward.r_success = ppo.r_success;
  env_cfg.reward.slack_scalar = ppo.slack_scalar;

  auto worlds = std::make_shared<std::vector<OccupancyGrid>>();
  for (int i = 0; i < cfg.train_worlds; ++i)
    worlds->push_back(
        generate_world(derive_seed(cfg.train_world_seed, static_cast<std::uint64_t>(i)), cfg.world));
  const std::vector<WorldFile> val =
      make_world_set(cfg.val_world_seed, cfg.val_worlds, cfg.world, episodes,
                     cfg.val_episodes_per_world, "val-");
  const std::vector<EvalItem> val_items = flatten(val);

  TrainResult result{TrainRun{}, Policy(cfg.policy, derive_seed(cfg.seed, 0xC0FFEE)),
                     Policy(cfg.policy, 0), ""};
  Policy& policy = result.last;
  policy = result.best;
  TrainRun& run = result.run;
  for (int i = 0; i < ppo.n_envs; ++i)
    run.env_seeds.push_back(derive_seed(cfg.seed, static_cast<std::uint64_t>(i)));

  std::vector<RolloutWorker> workers =
      make_workers(worlds, episodes, env_cfg, cfg.policy, ppo.n_envs, cfg.seed);
  Adam adam(policy.params(), AdamConfig{ppo.learning_rate, 0.9, 0.999, ppo.adam_epsilon});
  Rng update_rng(derive_seed(cfg.seed, 0xBA7C4));

  std::ofstream log_file;
  if (!cfg.out_dir.empty()) {
    std::filesystem::create_directories(cfg.out_dir);
    log_file.open(std::filesystem::path(cfg.out_dir) / "train_log.csv", std::ios::trunc);
    if (!log_file) throw Error("cannot write training log in " + cfg.out_dir);
  }
  if (!cfg.log_comment.empty()) result.log_csv = "# " + cfg.log_comment + "\n";
  result.log_csv += std::string(kTrainLogHeader) + "\n";
  if (log_file) log_file << result.log_csv;

  auto save = [&](const std::string& name, const Policy& p) {
    if (cfg.out_dir.empty()) return;
    save_checkpoint((std::filesystem::path(cfg.out_dir) / name).string(), p,
                    "step=" + std::to_string(run.step));
  };

  const long per_update = static_cast<long>(ppo.n_envs) * ppo.rollout_length;
  int evals_without_gain = 0;
  while (run.step < cfg.total_steps) {
    RolloutBuffer buf = collect_rollouts(workers, policy, ppo, cfg.threads);
    run.step += per_update;
    compute_advantages(buf, ppo);

    double dist_sum = 0.0;
    int dist_n = 0;
    for (const auto& seq : buf.steps)
      for (const auto& tr : seq)
        if (!tr.action.is_stop()) {
          dist_sum += tr.action.distance;
          ++dist_n;
        }
    int eps = 0, succ = 0;
    for (auto& w : workers) {
      eps += w.episodes;
      succ += w.successes;
      w.episodes = w.successes = 0;
    }

    LossTerms terms;
    try {
      terms = ppo_update(policy, adam, buf, ppo, update_rng);
    } catch (const NumericError&) {
      save("latest.ckpt", policy);
      throw;
    }
    ++run.updates;

    std::string eval_spl, eval_sr;
    const bool last = run.step >= cfg.total_steps;
    bool stop = false;
    if (cfg.eval_every > 0 && (run.updates % cfg.eval_every == 0 || last) && !val_items.empty()) {
      const auto results = evaluate_policy(policy, val_items, env_cfg, cfg.threads);
      const MetricsReport m = mean_report(score(val_items, results, MotionModel{}));
      eval_spl = fmt(m.SPL);
      eval_sr = fmt(m.SR);
      save("latest.ckpt", policy);
      if (m.SPL > run.best_spl) {
        run.best_spl = m.SPL;
        run.best_sr = m.SR;
        run.best_step = run.step;
        ++run.checkpoint_index;
        result.best = policy;
        save("best.ckpt", policy);
        evals_without_gain = 0;
      } else {
        ++evals_without_gain;
      }
      if (m.SR >= cfg.stop_at_val_sr) stop = true;
      if (cfg.patience > 0 && evals_without_gain >= cfg.patience) stop = true;
    }

    const std::string line =
        std::to_string(run.updates) + "," + std::to_string(run.step) + "," + fmt(terms.total) +
        "," + fmt(terms.action) + "," + fmt(terms.value) + "," + fmt(terms.entropy_pano) + "," +
        fmt(terms.entropy_offset) + "," + fmt(terms.entropy_distance) + "," + fmt(terms.offset) +
        "," + fmt(terms.grad_norm) + "," + fmt(dist_n ? dist_sum / dist_n : 0.0) + "," +
        (eps ? fmt(static_cast<double>(succ) / eps) : std::string()) + "," + eval_spl + "," +
        eval_sr;
    result.log_csv += line + "\n";
    if (log_file) log_file << line << '\n' << std::flush;
    if (progress) progress(run, line);
    if (stop) break;
  }
  if (run.best_spl < 0.0) {
    result.best = policy;
    save("best.ckpt", policy);
  }
  return result;
}

}  // namespace wpnav
