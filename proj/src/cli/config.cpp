#include "wpnav/cli/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

#include "wpnav/common/digest.hpp"
#include "wpnav/common/error.hpp"

namespace wpnav {
namespace {

using nlohmann::ordered_json;

// Reads known keys from one JSON object and rejects the rest.
class Section {
 public:
  Section(const ordered_json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ParseError("config: " + path_ + " must be an object", 0);
  }
  ~Section() = default;

  template <class T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    auto it = j_.find(key);
    if (it == j_.end()) return;
    try {
      out = it->template get<T>();
    } catch (const nlohmann::json::exception&) {
      throw ParseError("config: " + path_ + "." + key + " has the wrong type", 0);
    }
  }
  std::optional<Section> sub(const char* key) {
    seen_.insert(key);
    auto it = j_.find(key);
    if (it == j_.end()) return std::nullopt;
    return Section(*it, path_ + "." + key);
  }
  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key()))
        throw ParseError("config: unknown key " + path_ + "." + it.key(), 0);
  }

 private:
  const ordered_json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

ordered_json world_json(const ExperimentConfig& c) {
  const WorldParams& w = c.world;
  return {{"layout", to_string(w.layout)},
          {"width_m", w.width_m},
          {"height_m", w.height_m},
          {"resolution", w.resolution},
          {"rooms", w.rooms},
          {"room_min_m", w.room_min_m},
          {"room_max_m", w.room_max_m},
          {"corridor_width_m", w.corridor_width_m},
          {"obstacles", w.obstacles},
          {"obstacle_min_m", w.obstacle_min_m},
          {"obstacle_max_m", w.obstacle_max_m},
          {"max_attempts", w.max_attempts}};
}

ordered_json episodes_json(const ExperimentConfig& c) {
  const EpisodeParams& e = c.episodes;
  return {{"min_geodesic_m", e.min_geodesic_m},
          {"max_geodesic_m", e.max_geodesic_m},
          {"clearance_m", e.clearance_m},
          {"max_retries", e.max_retries}};
}

ordered_json seeds_json(const ExperimentConfig& c) {
  return {{"run", c.run_seed},
          {"train_worlds", c.train_world_seed},
          {"val_worlds", c.val_world_seed},
          {"test_worlds", c.test_world_seed}};
}

ordered_json counts_json(const ExperimentConfig& c) {
  return {{"train_worlds", c.train_worlds},
          {"val_worlds", c.val_worlds},
          {"val_episodes_per_world", c.val_episodes_per_world},
          {"test_worlds", c.test_worlds},
          {"test_episodes_per_world", c.test_episodes_per_world}};
}

ordered_json full_json(const ExperimentConfig& c, bool with_runtime) {
  const PPOConfig& p = c.ppo;
  ordered_json j;
  j["world"] = world_json(c);
  j["episodes"] = episodes_json(c);
  j["expressivity"] = c.policy.expressivity.code();
  j["navigator"] = to_string(c.navigator);
  j["policy"] = {{"feature_dim", c.policy.feature_dim},
                 {"vis_hidden", c.policy.vis_hidden},
                 {"act_hidden", c.policy.act_hidden},
                 {"embed_dim", c.policy.embed_dim},
                 {"goal_cue", c.policy.goal_cue},
                 {"pose_features", c.policy.pose_features}};
  j["ppo"] = {{"n_envs", p.n_envs},
              {"rollout_length", p.rollout_length},
              {"ppo_epochs", p.ppo_epochs},
              {"minibatches", p.minibatches},
              {"learning_rate", p.learning_rate},
              {"adam_epsilon", p.adam_epsilon},
              {"clip", p.clip},
              {"value_clip", p.value_clip},
              {"gamma", p.gamma},
              {"tau", p.tau},
              {"c_v", p.c_v},
              {"c_r", p.c_r},
              {"c_e", p.c_e},
              {"c_p", p.c_p},
              {"c_o", p.c_o},
              {"c_d", p.c_d},
              {"max_grad_norm", p.max_grad_norm},
              {"r_success", p.r_success},
              {"success_distance", p.success_distance},
              {"slack_scalar", p.slack_scalar}};
  j["env"] = {{"max_steps", c.env.max_steps},
              {"scan_max_range", c.env.scan.max_range},
              {"rays_per_sector", c.env.scan.rays_per_sector}};
  j["motion_model"] = {{"rotate", {{"a2", c.motion.a2}, {"a1", c.motion.a1}, {"a0", c.motion.a0}}},
                       {"translate", {{"b1", c.motion.b1}, {"b0", c.motion.b0}}},
                       {"null_command_epsilon", c.motion.null_command_epsilon}};
  j["oracle"] = {{"node_spacing", c.oracle.node_spacing},
                 {"heading_bins", c.oracle.heading_bins},
                 {"max_edge", c.oracle.max_edge}};
  j["seeds"] = seeds_json(c);
  j["counts"] = counts_json(c);
  j["training"] = {{"total_steps", c.total_steps},
                   {"eval_every", c.eval_every},
                   {"patience", c.patience},
                   {"stop_at_val_sr", c.stop_at_val_sr}};
  if (with_runtime) {
    j["training"]["threads"] = c.threads;
    j["output_dir"] = c.output_dir;
  }
  return j;
}

}  // namespace

ExperimentConfig::ExperimentConfig() {
  // Desk-scale defaults: open rooms with a few pillars and a 0.5 m success
  // radius, about a quarter of the photo-realistic scenes' scale.
  world.layout = Layout::open_room;
  world.width_m = 8.0;
  world.height_m = 8.0;
  world.obstacles = 3;
  world.obstacle_min_m = 0.3;
  world.obstacle_max_m = 0.8;
  episodes.min_geodesic_m = 1.0;
  episodes.max_geodesic_m = 5.0;
  ppo.success_distance = 0.5;
  episodes.success_distance = ppo.success_distance;
}

std::string ExperimentConfig::to_json() const { return full_json(*this, true).dump(2) + "\n"; }

std::string ExperimentConfig::digest() const { return digest_hex(full_json(*this, false).dump()); }

std::string ExperimentConfig::world_digest() const {
  ordered_json j;
  j["world"] = world_json(*this);
  j["episodes"] = episodes_json(*this);
  j["success_distance"] = ppo.success_distance;
  j["seeds"] = seeds_json(*this);
  j["counts"] = counts_json(*this);
  return digest_hex(j.dump());
}

ExperimentConfig ExperimentConfig::from_json(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    int line = 1;
    for (std::size_t i = 0; i < e.byte && i < text.size(); ++i)
      if (text[i] == '\n') ++line;
    throw ParseError(std::string("config: invalid JSON: ") + e.what(), line);
  }
  ExperimentConfig c;
  Section root(j, "config");
  if (auto s = root.sub("world")) {
    std::string layout = to_string(c.world.layout);
    s->get("layout", layout);
    c.world.layout = layout_from_string(layout);
    s->get("width_m", c.world.width_m);
    s->get("height_m", c.world.height_m);
    s->get("resolution", c.world.resolution);
    s->get("rooms", c.world.rooms);
    s->get("room_min_m", c.world.room_min_m);
    s->get("room_max_m", c.world.room_max_m);
    s->get("corridor_width_m", c.world.corridor_width_m);
    s->get("obstacles", c.world.obstacles);
    s->get("obstacle_min_m", c.world.obstacle_min_m);
    s->get("obstacle_max_m", c.world.obstacle_max_m);
    s->get("max_attempts", c.world.max_attempts);
    s->finish();
  }
  if (auto s = root.sub("episodes")) {
    s->get("min_geodesic_m", c.episodes.min_geodesic_m);
    s->get("max_geodesic_m", c.episodes.max_geodesic_m);
    s->get("clearance_m", c.episodes.clearance_m);
    s->get("max_retries", c.episodes.max_retries);
    s->finish();
  }
  std::string expr = c.policy.expressivity.code();
  root.get("expressivity", expr);
  c.policy.expressivity = ExpressivityConfig::from_code(expr);
  std::string nav = to_string(c.navigator);
  root.get("navigator", nav);
  c.navigator = navigator_from_string(nav);
  if (auto s = root.sub("policy")) {
    s->get("feature_dim", c.policy.feature_dim);
    s->get("vis_hidden", c.policy.vis_hidden);
    s->get("act_hidden", c.policy.act_hidden);
    s->get("embed_dim", c.policy.embed_dim);
    s->get("goal_cue", c.policy.goal_cue);
    s->get("pose_features", c.policy.pose_features);
    s->finish();
  }
  if (auto s = root.sub("ppo")) {
    PPOConfig& p = c.ppo;
    s->get("n_envs", p.n_envs);
    s->get("rollout_length", p.rollout_length);
    s->get("ppo_epochs", p.ppo_epochs);
    s->get("minibatches", p.minibatches);
    s->get("learning_rate", p.learning_rate);
    s->get("adam_epsilon", p.adam_epsilon);
    s->get("clip", p.clip);
    s->get("value_clip", p.value_clip);
    s->get("gamma", p.gamma);
    s->get("tau", p.tau);
    s->get("c_v", p.c_v);
    s->get("c_r", p.c_r);
    s->get("c_e", p.c_e);
    s->get("c_p", p.c_p);
    s->get("c_o", p.c_o);
    s->get("c_d", p.c_d);
    s->get("max_grad_norm", p.max_grad_norm);
    s->get("r_success", p.r_success);
    s->get("success_distance", p.success_distance);
    s->get("slack_scalar", p.slack_scalar);
    s->finish();
  }
  c.episodes.success_distance = c.ppo.success_distance;
  if (auto s = root.sub("env")) {
    s->get("max_steps", c.env.max_steps);
    s->get("scan_max_range", c.env.scan.max_range);
    s->get("rays_per_sector", c.env.scan.rays_per_sector);
    s->finish();
  }
  if (auto s = root.sub("motion_model")) {
    if (auto r = s->sub("rotate")) {
      r->get("a2", c.motion.a2);
      r->get("a1", c.motion.a1);
      r->get("a0", c.motion.a0);
      r->finish();
    }
    if (auto t = s->sub("translate")) {
      t->get("b1", c.motion.b1);
      t->get("b0", c.motion.b0);
      t->finish();
    }
    s->get("null_command_epsilon", c.motion.null_command_epsilon);
    s->finish();
    if (!c.motion.valid()) throw ParseError("config: motion model is not monotone", 0);
  }
  if (auto s = root.sub("oracle")) {
    s->get("node_spacing", c.oracle.node_spacing);
    s->get("heading_bins", c.oracle.heading_bins);
    s->get("max_edge", c.oracle.max_edge);
    s->finish();
  }
  if (auto s = root.sub("seeds")) {
    s->get("run", c.run_seed);
    s->get("train_worlds", c.train_world_seed);
    s->get("val_worlds", c.val_world_seed);
    s->get("test_worlds", c.test_world_seed);
    s->finish();
  }
  if (auto s = root.sub("counts")) {
    s->get("train_worlds", c.train_worlds);
    s->get("val_worlds", c.val_worlds);
    s->get("val_episodes_per_world", c.val_episodes_per_world);
    s->get("test_worlds", c.test_worlds);
    s->get("test_episodes_per_world", c.test_episodes_per_world);
    s->finish();
  }
  if (auto s = root.sub("training")) {
    s->get("total_steps", c.total_steps);
    s->get("eval_every", c.eval_every);
    s->get("patience", c.patience);
    s->get("stop_at_val_sr", c.stop_at_val_sr);
    s->get("threads", c.threads);
    s->finish();
  }
  root.get("output_dir", c.output_dir);
  root.finish();
  return c;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error("cannot read config " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return from_json(ss.str());
}

TrainConfig ExperimentConfig::train_config() const {
  TrainConfig t;
  t.ppo = ppo;
  t.policy = policy;
  t.env = eval_env(navigator);
  t.world = world;
  t.episodes = episodes;
  t.seed = run_seed;
  t.train_world_seed = train_world_seed;
  t.val_world_seed = val_world_seed;
  t.train_worlds = train_worlds;
  t.val_worlds = val_worlds;
  t.val_episodes_per_world = val_episodes_per_world;
  t.total_steps = total_steps;
  t.eval_every = eval_every;
  t.patience = patience;
  t.stop_at_val_sr = stop_at_val_sr;
  t.threads = threads;
  return t;
}

EnvConfig ExperimentConfig::eval_env(NavigatorKind nav) const {
  EnvConfig e = env;
  e.navigator = nav;
  e.reward.r_success = ppo.r_success;
  e.reward.slack_scalar = ppo.slack_scalar;
  return e;
}

}  // namespace wpnav
