#include "wpnav/trainer/ppo.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <thread>

#include "wpnav/common/error.hpp"

namespace wpnav {

GaeResult gae(const std::vector<double>& rewards, const std::vector<double>& values,
              const std::vector<bool>& dones, double bootstrap, double gamma, double tau) {
  const std::size_t n = rewards.size();
  if (values.size() != n || dones.size() != n)
    throw InvalidArgument("gae: rewards, values and dones differ in length");
  GaeResult out;
  out.advantages.assign(n, 0.0);
  out.returns.assign(n, 0.0);
  double next_value = bootstrap;
  double next_adv = 0.0;
  for (std::size_t i = n; i-- > 0;) {
    const double mask = dones[i] ? 0.0 : 1.0;
    const double delta = rewards[i] + gamma * mask * next_value - values[i];
    next_adv = delta + gamma * tau * mask * next_adv;
    out.advantages[i] = next_adv;
    out.returns[i] = next_adv + values[i];
    next_value = values[i];
  }
  return out;
}

void normalize(std::vector<double>& v, double epsilon) {
  if (v.empty()) return;
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  const double sd = std::sqrt(ss / static_cast<double>(v.size()));
  for (double& x : v) x = (x - mean) / (sd + epsilon);
}

WaypointAction sample_waypoint(const HeadOutputs& h, Rng& rng, double* offset_uniform) {
  WaypointAction a;
  a.pano = h.pano.sample(rng);
  if (offset_uniform) *offset_uniform = 0.5;
  if (a.is_stop()) return WaypointAction::stop();
  const auto s = static_cast<std::size_t>(a.pano);
  const ComponentHead& off = h.offset[s];
  if (off.mode() == HeadMode::continuous) {
    const double u = rng.uniform_open();
    if (offset_uniform) *offset_uniform = u;
    a.offset = off.gaussian().quantile(u);
  } else {
    a.offset = off.sample(rng);
  }
  a.distance = h.distance[s].sample(rng);
  return a;
}

void RolloutWorker::reset(const PolicyConfig& pcfg) {
  auto [w, ep] = sampler->next();
  env = std::make_unique<NavEnv>((*worlds)[w], ep, pcfg, env_cfg);
  state = PolicyState::initial(pcfg);
}

std::vector<RolloutWorker> make_workers(std::shared_ptr<const std::vector<OccupancyGrid>> worlds,
                                        const EpisodeParams& episodes, const EnvConfig& env_cfg,
                                        const PolicyConfig& pcfg, int n_envs,
                                        std::uint64_t run_seed) {
  if (n_envs < 1) throw InvalidArgument("n_envs must be >= 1");
  std::vector<RolloutWorker> workers(static_cast<std::size_t>(n_envs));
  for (int i = 0; i < n_envs; ++i) {
    RolloutWorker& w = workers[static_cast<std::size_t>(i)];
    const std::uint64_t seed = derive_seed(run_seed, static_cast<std::uint64_t>(i));
    w.sampler = std::make_shared<EpisodeSampler>(worlds, episodes, derive_seed(seed, 1));
    w.worlds = worlds;
    w.env_cfg = env_cfg;
    w.rng = Rng(derive_seed(seed, 2));
    w.reset(pcfg);
  }
  return workers;
}

namespace {

void run_worker(RolloutWorker& w, const Policy& policy, const PPOConfig& cfg,
                std::vector<Transition>& out, double& bootstrap) {
  const PolicyConfig& pcfg = policy.config();
  out.clear();
  out.reserve(static_cast<std::size_t>(cfg.rollout_length));
  for (int t = 0; t < cfg.rollout_length; ++t) {
    Transition tr;
    tr.obs = w.env->observe();
    tr.state = w.state;
    const PolicyOutput po = policy.act(tr.obs, tr.state);
    const HeadOutputs heads = head_outputs(po, pcfg.expressivity);
    tr.action = sample_waypoint(heads, w.rng, &tr.offset_uniform);
    tr.logprob = joint_logprob(heads, tr.action);
    tr.value = po.value;
    const StepResult sr = w.env->step(tr.action);
    tr.reward = sr.reward;
    tr.done = sr.done;
    w.state = policy.advance(po, tr.obs, tr.action);
    if (sr.done) {
      ++w.episodes;
      if (sr.success) ++w.successes;
      w.reset(pcfg);
    }
    out.push_back(std::move(tr));
  }
  bootstrap = policy.act(w.env->observe(), w.state).value;
}

}  // namespace

RolloutBuffer collect_rollouts(std::vector<RolloutWorker>& workers, const Policy& policy,
                               const PPOConfig& cfg, int threads) {
  RolloutBuffer buf;
  buf.n_envs = static_cast<int>(workers.size());
  buf.length = cfg.rollout_length;
  buf.steps.resize(workers.size());
  buf.bootstrap.assign(workers.size(), 0.0);
  if (threads <= 1 || workers.size() == 1) {
    for (std::size_t i = 0; i < workers.size(); ++i)
      run_worker(workers[i], policy, cfg, buf.steps[i], buf.bootstrap[i]);
    return buf;
  }
  std::vector<std::exception_ptr> errors(workers.size());
  std::vector<std::thread> pool;
  const std::size_t nthreads = std::min<std::size_t>(static_cast<std::size_t>(threads), workers.size());
  for (std::size_t k = 0; k < nthreads; ++k) {
    pool.emplace_back([&, k] {
      for (std::size_t i = k; i < workers.size(); i += nthreads) {
        try {
          run_worker(workers[i], policy, cfg, buf.steps[i], buf.bootstrap[i]);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  for (std::size_t i = 0; i < errors.size(); ++i) {
    if (!errors[i]) continue;
    try {
      std::rethrow_exception(errors[i]);
    } catch (const std::exception& e) {
      throw Error("rollout worker " + std::to_string(i) + ": " + e.what());
    }
  }
  return buf;
}

void compute_advantages(RolloutBuffer& buf, const PPOConfig& cfg) {
  std::vector<double> all;
  for (std::size_t e = 0; e < buf.steps.size(); ++e) {
    auto& seq = buf.steps[e];
    std::vector<double> r, v;
    std::vector<bool> d;
    for (const auto& tr : seq) {
      r.push_back(tr.reward);
      v.push_back(tr.value);
      d.push_back(tr.done);
    }
    const GaeResult g = gae(r, v, d, buf.bootstrap[e], cfg.gamma, cfg.tau);
    for (std::size_t t = 0; t < seq.size(); ++t) {
      seq[t].advantage = g.advantages[t];
      seq[t].ret = g.returns[t];
      all.push_back(g.advantages[t]);
    }
  }
  if (cfg.normalize_advantages) {
    normalize(all, cfg.advantage_epsilon);
    std::size_t k = 0;
    for (auto& seq : buf.steps)
      for (auto& tr : seq) tr.advantage = all[k++];
  }
}

LossTerms ppo_losses(Tape& t, const Policy& policy, const RolloutBuffer& buf,
                     const std::vector<int>& envs, const PPOConfig& cfg, Var* loss,
                     std::vector<double>* replayed_logprobs) {
  const ExpressivityConfig& ex = policy.config().expressivity;
  std::vector<Var> surrogate, value_terms, ent_p, ent_o, ent_d, offsets;
  for (int e : envs) {
    const auto& seq = buf.steps.at(static_cast<std::size_t>(e));
    Var hv, ha;
    for (std::size_t k = 0; k < seq.size(); ++k) {
      const Transition& tr = seq[k];
      // Episodes that ended inside the rollout restart from their stored
      // (reset) state; otherwise the recurrence is unrolled.
      const bool restart = k == 0 || seq[k - 1].done;
      const PolicyVars v = policy.forward(t, tr.obs, tr.state, restart ? Var{} : hv,
                                          restart ? Var{} : ha);
      hv = v.h_vis;
      ha = v.h_a;

      const Var lp = joint_logprob(t, v, ex, tr.action);
      if (replayed_logprobs) replayed_logprobs->push_back(t.item(lp));
      const Var ratio = t.exp(t.add_scalar(lp, -tr.logprob));
      const Var adv = t.scalar(tr.advantage);
      surrogate.push_back(
          t.minimum(t.mul(ratio, adv), t.mul(t.clamp(ratio, 1.0 - cfg.clip, 1.0 + cfg.clip), adv)));

      const Var ret = t.scalar(tr.ret);
      const Var err = t.square(t.sub(v.value, ret));
      if (cfg.value_clip) {
        const Var clipped = t.add_scalar(
            t.clamp(t.add_scalar(v.value, -tr.value), -cfg.clip, cfg.clip), tr.value);
        value_terms.push_back(t.maximum(err, t.square(t.sub(clipped, ret))));
      } else {
        value_terms.push_back(err);
      }

      const EntropyVars ent = decomposed_entropy(t, v, ex);
      ent_p.push_back(ent.pano);
      ent_o.push_back(ent.offset);
      ent_d.push_back(ent.distance);
      if (!tr.action.is_stop()) offsets.push_back(offset_magnitude(t, v, ex, tr.action, tr.offset_uniform));
    }
  }
  if (surrogate.empty()) throw InvalidArgument("ppo_losses: empty minibatch");
  auto mean_of = [&](const std::vector<Var>& xs) { return t.mean(t.concat_rows(xs)); };
  const Var l_action = t.neg(mean_of(surrogate));
  const Var l_value = t.scale(mean_of(value_terms), 0.5);
  const Var s_p = mean_of(ent_p);
  const Var s_o = mean_of(ent_o);
  const Var s_d = mean_of(ent_d);
  const Var l_s =
      t.add(t.add(t.scale(s_p, cfg.c_p), t.scale(s_o, cfg.c_o)), t.scale(s_d, cfg.c_d));
  const Var l_offset = offsets.empty() ? t.scalar(0.0) : mean_of(offsets);
  const Var total = t.add(t.add(t.add(l_action, t.scale(l_value, cfg.c_v)), t.scale(l_s, -cfg.c_e)),
                          t.scale(l_offset, cfg.c_r));
  if (loss) *loss = total;

  LossTerms terms;
  terms.action = t.item(l_action);
  terms.value = t.item(l_value);
  terms.entropy_pano = t.item(s_p);
  terms.entropy_offset = t.item(s_o);
  terms.entropy_distance = t.item(s_d);
  terms.entropy = t.item(l_s);
  terms.offset = t.item(l_offset);
  terms.total = t.item(total);
  return terms;
}

LossTerms ppo_update(Policy& policy, Adam& adam, const RolloutBuffer& buf, const PPOConfig& cfg,
                     Rng& rng) {
  const int groups = std::max(1, std::min(cfg.minibatches, buf.n_envs));
  std::vector<int> order(static_cast<std::size_t>(buf.n_envs));
  LossTerms mean;
  int count = 0;
  for (int epoch = 0; epoch < cfg.ppo_epochs; ++epoch) {
    std::iota(order.begin(), order.end(), 0);
    for (std::size_t i = order.size(); i > 1; --i)
      std::swap(order[i - 1], order[rng.below(i)]);
    for (int g = 0; g < groups; ++g) {
      std::vector<int> envs;
      for (std::size_t i = static_cast<std::size_t>(g); i < order.size();
           i += static_cast<std::size_t>(groups))
        envs.push_back(order[i]);
      policy.params().zero_grad();
      Tape t;
      Var loss;
      LossTerms terms = ppo_losses(t, policy, buf, envs, cfg, &loss);
      if (!std::isfinite(terms.total))
        throw NumericError("non-finite PPO loss (action " + std::to_string(terms.action) +
                           ", value " + std::to_string(terms.value) + ")");
      t.backward(loss);
      terms.grad_norm = policy.params().clip_grad_norm(cfg.max_grad_norm);
      adam.step();
      mean.action += terms.action;
      mean.value += terms.value;
      mean.entropy_pano += terms.entropy_pano;
      mean.entropy_offset += terms.entropy_offset;
      mean.entropy_distance += terms.entropy_distance;
      mean.entropy += terms.entropy;
      mean.offset += terms.offset;
      mean.total += terms.total;
      mean.grad_norm += terms.grad_norm;
      ++count;
    }
  }
  if (count > 0) {
    const double inv = 1.0 / count;
    for (double* x : {&mean.action, &mean.value, &mean.entropy_pano, &mean.entropy_offset,
                      &mean.entropy_distance, &mean.entropy, &mean.offset, &mean.total,
                      &mean.grad_norm})
      *x *= inv;
  }
  return mean;
}

}  // namespace wpnav
