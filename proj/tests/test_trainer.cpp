#include <cmath>
#include <memory>

#include "doctest.h"
#include "oracles.hpp"
#include "wpnav/common/error.hpp"
#include "wpnav/policy/checkpoint.hpp"
#include "wpnav/trainer/evaluate.hpp"
#include "wpnav/trainer/ppo.hpp"
#include "wpnav/trainer/train.hpp"

using namespace wpnav;

namespace {

PolicyConfig tiny_policy() {
  PolicyConfig c;
  c.feature_dim = 6;
  c.vis_hidden = 6;
  c.act_hidden = 6;
  c.embed_dim = 3;
  return c;
}

Episode straight_episode() {
  Episode e;
  e.id = "straight";
  e.start = Pose{1.0, 2.6, 0.0};
  e.goal = Point{2.5, 2.6};
  e.instruction = {Vocabulary::kGo, Vocabulary::kForward, Vocabulary::kThen, Vocabulary::kStop};
  e.success_distance = 0.5;
  return e;
}

std::shared_ptr<std::vector<OccupancyGrid>> small_worlds(int n) {
  WorldParams wp;
  wp.layout = Layout::open_room;
  wp.width_m = 5.0;
  wp.height_m = 5.0;
  auto worlds = std::make_shared<std::vector<OccupancyGrid>>();
  for (int i = 0; i < n; ++i) worlds->push_back(generate_world(static_cast<std::uint64_t>(i), wp));
  return worlds;
}

EpisodeParams small_episodes() {
  EpisodeParams ep;
  ep.min_geodesic_m = 1.0;
  ep.max_geodesic_m = 3.5;
  return ep;
}

// A_t as the truncated sum of discounted TD errors inside one episode.
std::vector<double> gae_by_sum(const std::vector<double>& r, const std::vector<double>& v,
                               const std::vector<bool>& done, double bootstrap, double gamma,
                               double tau) {
  const std::size_t n = r.size();
  std::vector<double> delta(n), a(n, 0.0);
  for (std::size_t t = 0; t < n; ++t) {
    const double next = t + 1 < n ? v[t + 1] : bootstrap;
    delta[t] = r[t] + (done[t] ? 0.0 : gamma * next) - v[t];
  }
  for (std::size_t t = 0; t < n; ++t) {
    double w = 1.0;
    for (std::size_t l = t; l < n; ++l) {
      a[t] += w * delta[l];
      if (done[l]) break;
      w *= gamma * tau;
    }
  }
  return a;
}

}  // namespace

TEST_CASE("step reward") {
  const RewardConfig rc;
  WaypointAction move{0, 0.0, 1.0};
  CHECK(step_reward(2.0, 1.2, move, false, false, rc) == doctest::Approx(0.8 - 0.2));
  CHECK(step_reward(1.0, 1.5, move, false, false, rc) == doctest::Approx(-0.5 - 0.2));
  CHECK(step_reward(0.3, 0.3, WaypointAction::stop(), true, true, rc) == doctest::Approx(2.5));
  CHECK(step_reward(0.9, 0.9, WaypointAction::stop(), true, false, rc) == doctest::Approx(0.0));
}

TEST_CASE("gae matches the discounted TD sum") {
  Rng rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 1 + static_cast<int>(rng.below(12));
    std::vector<double> r(n), v(n);
    std::vector<bool> d(n);
    for (int i = 0; i < n; ++i) {
      r[i] = rng.uniform(-1.0, 3.0);
      v[i] = rng.uniform(-1.0, 1.0);
      d[i] = rng.uniform() < 0.25;
    }
    const double boot = rng.uniform(-1.0, 1.0);
    const GaeResult g = gae(r, v, d, boot, 0.99, 0.95);
    const std::vector<double> want = gae_by_sum(r, v, d, boot, 0.99, 0.95);
    for (int i = 0; i < n; ++i) {
      CHECK(g.advantages[i] == doctest::Approx(want[i]).epsilon(1e-12));
      CHECK(g.returns[i] == doctest::Approx(want[i] + v[i]).epsilon(1e-12));
    }
    // With gamma = tau = 1 returns telescope to the undiscounted reward-to-go.
    const GaeResult u = gae(r, v, d, boot, 1.0, 1.0);
    for (int i = 0; i < n; ++i) {
      double sum = 0.0;
      bool ended = false;
      for (int l = i; l < n && !ended; ++l) {
        sum += r[l];
        ended = d[l];
      }
      if (!ended) sum += boot;
      CHECK(u.returns[i] == doctest::Approx(sum).epsilon(1e-12));
    }
  }
  CHECK_THROWS_AS(gae({1.0}, {1.0, 2.0}, {false}, 0.0, 0.9, 0.9), InvalidArgument);
}

TEST_CASE("normalize") {
  std::vector<double> v{1.0, 2.0, 3.0, 6.0};
  normalize(v, 1e-8);
  double mean = 0, var = 0;
  for (double x : v) mean += x / 4;
  for (double x : v) var += (x - mean) * (x - mean) / 4;
  CHECK(mean == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(var == doctest::Approx(1.0).epsilon(1e-6));
  std::vector<double> c{2.0, 2.0};
  normalize(c, 1e-8);
  CHECK(c[0] == 0.0);
}

TEST_CASE("environment steps, stops and times out") {
  const OccupancyGrid g = oracle::closed_room(50, 50, 0.1);
  EnvConfig cfg;
  cfg.max_steps = 3;
  NavEnv env(g, straight_episode(), PolicyConfig{}, cfg);
  CHECK(env.geodesic_to_goal() == doctest::Approx(1.5).epsilon(0.02));
  const StepResult s1 = env.step(WaypointAction{0, 0.0, 1.0});
  CHECK(env.pose().x == doctest::Approx(2.0));
  CHECK(s1.reward == doctest::Approx(1.0 - 0.2).epsilon(0.02));
  CHECK_FALSE(s1.done);
  const StepResult s2 = env.step(WaypointAction::stop());
  CHECK(s2.done);
  CHECK(s2.success);
  CHECK(s2.reward == doctest::Approx(2.5));
  CHECK(env.result().success);
  CHECK(env.result().actions.size() == 2);
  CHECK(env.result().commands.back().kind == Command::Kind::stop);
  CHECK_THROWS_AS(env.step(WaypointAction::stop()), InvalidArgument);

  NavEnv slow(g, straight_episode(), PolicyConfig{}, cfg);
  StepResult last;
  for (int i = 0; i < 3; ++i) last = slow.step(WaypointAction{6, 0.0, 0.25});
  CHECK(last.done);
  CHECK_FALSE(last.success);
  CHECK_FALSE(slow.result().stopped);

  Episode bad = straight_episode();
  bad.start = Pose{0.05, 0.05, 0.0};
  CHECK_THROWS_AS(NavEnv(g, bad, PolicyConfig{}, cfg), InvalidPose);
}

TEST_CASE("rollouts replay exactly and feed the loss") {
  const auto worlds = small_worlds(2);
  for (const char* code : {"cc", "dd", "fixedc"}) {
    PolicyConfig pc = tiny_policy();
    pc.expressivity = ExpressivityConfig::from_code(code);
    PPOConfig cfg;
    cfg.n_envs = 3;
    cfg.rollout_length = 6;
    EnvConfig ec;
    ec.max_steps = 4;
    const Policy pol(pc, 11);
    auto workers = make_workers(worlds, small_episodes(), ec, pc, cfg.n_envs, 9);
    RolloutBuffer buf = collect_rollouts(workers, pol, cfg);
    CHECK(buf.size() == 18);
    compute_advantages(buf, cfg);

    // Threaded collection yields the same buffer.
    auto workers2 = make_workers(worlds, small_episodes(), ec, pc, cfg.n_envs, 9);
    const RolloutBuffer par = collect_rollouts(workers2, pol, cfg, 2);
    for (int e = 0; e < cfg.n_envs; ++e)
      for (int k = 0; k < cfg.rollout_length; ++k) {
        CHECK(par.steps[e][k].logprob == buf.steps[e][k].logprob);
        CHECK(par.steps[e][k].reward == buf.steps[e][k].reward);
      }

    Tape t;
    Var loss;
    std::vector<double> lp;
    const std::vector<int> all{0, 1, 2};
    const LossTerms terms = ppo_losses(t, pol, buf, all, cfg, &loss, &lp);
    double adv = 0.0, verr = 0.0;
    std::size_t k = 0;
    for (int e : all)
      for (const Transition& tr : buf.steps[e]) {
        CHECK(std::abs(lp[k++] - tr.logprob) < 1e-9);
        adv += tr.advantage;
        verr += (tr.value - tr.ret) * (tr.value - tr.ret);
      }
    // At the behaviour policy the ratio is one.
    CHECK(terms.action == doctest::Approx(-adv / 18).epsilon(1e-9));
    CHECK(terms.value == doctest::Approx(0.5 * verr / 18).epsilon(1e-9));
  }
}

TEST_CASE("surrogate clipping") {
  const auto worlds = small_worlds(1);
  const PolicyConfig pc = tiny_policy();
  PPOConfig cfg;
  cfg.n_envs = 1;
  cfg.rollout_length = 4;
  cfg.c_v = cfg.c_e = cfg.c_r = 0.0;
  Policy pol(pc, 2);
  auto workers = make_workers(worlds, small_episodes(), EnvConfig{}, pc, 1, 4);
  RolloutBuffer buf = collect_rollouts(workers, pol, cfg);
  // Pretend the behaviour policy was half as likely: ratio 2.
  for (Transition& tr : buf.steps[0]) tr.logprob -= std::log(2.0);

  for (Transition& tr : buf.steps[0]) tr.advantage = 1.0;
  {
    Tape t;
    Var loss;
    const LossTerms terms = ppo_losses(t, pol, buf, {0}, cfg, &loss);
    CHECK(terms.action == doctest::Approx(-1.2));
    pol.params().zero_grad();
    t.backward(loss);
    CHECK(pol.params().grad_norm() == 0.0);
  }
  for (Transition& tr : buf.steps[0]) tr.advantage = -1.0;
  {
    Tape t;
    Var loss;
    const LossTerms terms = ppo_losses(t, pol, buf, {0}, cfg, &loss);
    CHECK(terms.action == doctest::Approx(2.0));
    pol.params().zero_grad();
    t.backward(loss);
    CHECK(pol.params().grad_norm() > 0.0);
  }
  CHECK_THROWS_AS(ppo_losses(*std::make_unique<Tape>(), pol, buf, {}, cfg, nullptr),
                  InvalidArgument);
}

TEST_CASE("sampled actions follow the head distributions") {
  Rng rng(21);
  const HeadOutputs h = oracle::random_heads(ExpressivityConfig::from_code("dc"), rng);
  std::vector<int> counts(kPanoSize, 0);
  const int n = 40000;
  for (int i = 0; i < n; ++i) {
    double u = -1.0;
    const WaypointAction a = sample_waypoint(h, rng, &u);
    ++counts[static_cast<std::size_t>(a.pano)];
    if (!a.is_stop()) {
      CHECK(u >= 0.0);
      CHECK(u <= 1.0);
    }
  }
  for (int i = 0; i < kPanoSize; ++i)
    CHECK(counts[i] / double(n) == doctest::Approx(h.pano.prob(i)).epsilon(0.02).scale(1.0));
}

TEST_CASE("short training run is deterministic") {
  TrainConfig tc;
  tc.policy = tiny_policy();
  tc.world.layout = Layout::open_room;
  tc.world.width_m = 5.0;
  tc.world.height_m = 5.0;
  tc.episodes = small_episodes();
  tc.env.max_steps = 5;
  tc.ppo.n_envs = 2;
  tc.ppo.rollout_length = 8;
  tc.train_worlds = 2;
  tc.val_worlds = 1;
  tc.val_episodes_per_world = 2;
  tc.total_steps = 64;
  tc.eval_every = 2;
  const TrainResult a = train(tc);
  const TrainResult b = train(tc);
  CHECK(a.run.step == 64);
  CHECK(a.run.updates == 4);
  CHECK(a.log_csv == b.log_csv);
  CHECK(serialize_checkpoint(a.best, "") == serialize_checkpoint(b.best, ""));
  CHECK(serialize_checkpoint(a.last, "") == serialize_checkpoint(b.last, ""));
  CHECK(a.log_csv.find(kTrainLogHeader) != std::string::npos);

  tc.seed = 2;
  const TrainResult c = train(tc);
  CHECK(serialize_checkpoint(c.last, "") != serialize_checkpoint(a.last, ""));
}

TEST_CASE("evaluation and scoring") {
  const PolicyConfig pc = tiny_policy();
  const Policy pol(pc, 3);
  WorldParams wp;
  wp.layout = Layout::open_room;
  wp.width_m = 5.0;
  wp.height_m = 5.0;
  const std::vector<WorldFile> worlds = make_world_set(7, 2, wp, small_episodes(), 3, "val");
  const std::vector<EvalItem> items = flatten(worlds);
  REQUIRE(items.size() == 6);
  CHECK(items[3].episode == &worlds[1].episodes[0]);
  EnvConfig ec;
  ec.max_steps = 6;
  const auto r1 = evaluate_policy(pol, items, ec);
  const auto r2 = evaluate_policy(pol, items, ec, 3);
  REQUIRE(r1.size() == 6);
  for (std::size_t i = 0; i < r1.size(); ++i) {
    CHECK(r1[i].path == r2[i].path);
    CHECK(r1[i].success == r2[i].success);
    CHECK(r1[i].actions.size() <= 6);
    const EpisodeResult single = run_episode(pol, *items[i].grid, *items[i].episode, ec);
    CHECK(single.final_position == r1[i].final_position);
  }
  const MotionModel m;
  LatticeParams lp;
  lp.node_spacing = 0.2;
  lp.heading_bins = 24;
  const auto oracle = oracle_times(items, m, lp);
  const auto rows = score(items, r1, m, &oracle);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(oracle[i].T > 0.0);
    CHECK(rows[i].SCT <= rows[i].SR);
    CHECK(rows[i].SPL <= rows[i].SR);
    CHECK(rows[i].n_commands == count_commands(r1[i].commands));
  }
  const auto bare = score(items, r1, m);
  for (const auto& row : bare) CHECK(row.SCT == 0.0);
}
