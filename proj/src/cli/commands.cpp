#include "wpnav/cli/commands.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "json.hpp"
#include "wpnav/cli/render.hpp"
#include "wpnav/common/digest.hpp"
#include "wpnav/common/error.hpp"
#include "wpnav/metrics/report_io.hpp"
#include "wpnav/metrics/waypoint_stats.hpp"
#include "wpnav/policy/checkpoint.hpp"
#include "wpnav/trainer/evaluate.hpp"

namespace wpnav {
namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

void say(const CliContext& ctx, const std::string& msg) {
  if (ctx.out) *ctx.out << msg << '\n';
}

void warn(const CliContext& ctx, const std::string& msg) {
  if (ctx.err) *ctx.err << "warning: " << msg << '\n';
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error("cannot read " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error("cannot write " + path);
  f << text;
  if (!f) throw Error("cannot write " + path);
}

void require_writable(const CliContext& ctx, const std::string& path) {
  if (fs::exists(path) && !ctx.force)
    throw Error(path + " exists; pass --force to overwrite");
}

ordered_json report_json(const MetricsReport& r) {
  return {{"TL", r.TL},   {"NE", r.NE},   {"OS", r.OS},   {"SR", r.SR},
          {"SPL", r.SPL}, {"EET", r.EET}, {"SCT", r.SCT}, {"n_commands", r.n_commands},
          {"speed", r.speed}};
}

ordered_json stamp_json(const ExperimentConfig& cfg) {
  return {{"tool", "wpnav"}, {"version", kToolVersion}, {"config_digest", cfg.digest()}};
}

std::string result_line(const std::string& world, const EpisodeResult& r) {
  ordered_json j;
  j["world"] = world;
  j["episode"] = r.episode.id;
  j["success"] = r.success;
  j["stopped"] = r.stopped;
  j["final"] = {r.final_position.x, r.final_position.y};
  ordered_json path = ordered_json::array();
  for (const Point& p : r.path) path.push_back({p.x, p.y});
  j["path"] = std::move(path);
  ordered_json dec = ordered_json::array();
  for (const Pose& p : r.decision_poses) dec.push_back({p.x, p.y, p.heading});
  j["decisions"] = std::move(dec);
  ordered_json acts = ordered_json::array();
  for (const WaypointAction& a : r.actions) acts.push_back({a.pano, a.offset, a.distance});
  j["actions"] = std::move(acts);
  ordered_json cmds = ordered_json::array();
  std::istringstream log(write_command_log(r.commands));
  for (std::string line; std::getline(log, line);) cmds.push_back(line);
  j["commands"] = std::move(cmds);
  return j.dump();
}

std::vector<WorldFile> load_worlds(const CliContext& ctx, const std::string& dir,
                                   std::vector<std::string>* names) {
  const std::string manifest_path = (fs::path(dir) / "manifest.json").string();
  ordered_json manifest;
  try {
    manifest = ordered_json::parse(read_file(manifest_path));
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(manifest_path + ": " + e.what(), 0);
  }
  const std::string digest = manifest.value("world_digest", "");
  if (digest != ctx.cfg.world_digest()) {
    if (!ctx.force)
      throw DigestMismatch("world set digest " + digest + " does not match config world digest " +
                           ctx.cfg.world_digest());
    warn(ctx, "world set digest differs from the config; continuing because of --force");
  }
  std::vector<WorldFile> worlds;
  for (const auto& f : manifest.at("files")) {
    const std::string name = f.get<std::string>();
    worlds.push_back(load_world_file((fs::path(dir) / name).string()));
    if (names) names->push_back(name);
  }
  return worlds;
}

}  // namespace

std::string resolve_out_dir(const std::string& flag, const ExperimentConfig& cfg) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("WPNAV_OUT"); env && *env) return env;
  return cfg.output_dir;
}

std::string artifact_stamp(const ExperimentConfig& cfg) {
  return std::string("wpnav ") + kToolVersion + " config " + cfg.digest();
}

std::string worlds_dir(const CliContext& ctx) { return (fs::path(ctx.out_dir) / "worlds").string(); }

std::string train_dir(const CliContext& ctx) {
  return (fs::path(ctx.out_dir) /
          ("train-" + ctx.cfg.policy.expressivity.code() + "-" + to_string(ctx.cfg.navigator)))
      .string();
}

std::string eval_dir(const CliContext& ctx, NavigatorKind nav) {
  return (fs::path(ctx.out_dir) /
          ("eval-" + ctx.cfg.policy.expressivity.code() + "-" + to_string(nav)))
      .string();
}

std::vector<std::string> cmd_generate(const CliContext& ctx) {
  const ExperimentConfig& c = ctx.cfg;
  const std::string dir = worlds_dir(ctx);
  const std::string manifest_path = (fs::path(dir) / "manifest.json").string();
  require_writable(ctx, manifest_path);
  fs::create_directories(dir);
  const std::vector<WorldFile> set = make_world_set(
      c.test_world_seed, c.test_worlds, c.world, c.episodes, c.test_episodes_per_world, "test-");
  std::vector<std::string> paths;
  ordered_json files = ordered_json::array();
  for (std::size_t i = 0; i < set.size(); ++i) {
    std::ostringstream name;
    name << "test-" << std::setw(3) << std::setfill('0') << i << ".world";
    WorldFile wf = set[i];
    wf.meta["config_digest"] = c.digest();
    wf.meta["world_digest"] = c.world_digest();
    wf.meta["version"] = kToolVersion;
    const std::string path = (fs::path(dir) / name.str()).string();
    require_writable(ctx, path);
    write_file(path, write_world_file(wf));
    paths.push_back(path);
    files.push_back(name.str());
  }
  ordered_json manifest = stamp_json(c);
  manifest["world_digest"] = c.world_digest();
  manifest["files"] = std::move(files);
  write_file(manifest_path, manifest.dump(2) + "\n");
  say(ctx, "wrote " + std::to_string(paths.size()) + " world files to " + dir);
  return paths;
}

std::string cmd_train(const CliContext& ctx) {
  const std::string dir = train_dir(ctx);
  const std::string best = (fs::path(dir) / "best.ckpt").string();
  require_writable(ctx, best);
  TrainConfig tc = ctx.cfg.train_config();
  tc.out_dir = dir;
  tc.log_comment = artifact_stamp(ctx.cfg);
  const TrainResult res = train(tc, [&](const TrainRun& run, const std::string& line) {
    if (ctx.out && line.find(",,") == std::string::npos && line.back() != ',')
      *ctx.out << "update " << run.updates << " step " << run.step << ": " << line << '\n';
  });
  ordered_json summary = stamp_json(ctx.cfg);
  summary["policy_digest"] = ctx.cfg.policy.digest();
  summary["steps"] = res.run.step;
  summary["updates"] = res.run.updates;
  summary["best_val_spl"] = res.run.best_spl;
  summary["best_val_sr"] = res.run.best_sr;
  summary["best_step"] = res.run.best_step;
  summary["env_seeds"] = res.run.env_seeds;
  write_file((fs::path(dir) / "summary.json").string(), summary.dump(2) + "\n");
  say(ctx, "best validation SPL " + format_double(res.run.best_spl) + " at step " +
               std::to_string(res.run.best_step) + "; checkpoint " + best);
  return best;
}

std::string cmd_evaluate(const CliContext& ctx, const EvaluateArgs& args) {
  const ExperimentConfig& c = ctx.cfg;
  std::string ckpt = args.checkpoint;
  if (ckpt.empty()) {
    // Navigators are swappable at evaluation, so fall back to a checkpoint
    // trained with the other one.
    ckpt = (fs::path(train_dir(ctx)) / "best.ckpt").string();
    if (!fs::exists(ckpt)) {
      CliContext other = ctx;
      other.cfg.navigator = c.navigator == NavigatorKind::continuous ? NavigatorKind::discrete
                                                                     : NavigatorKind::continuous;
      const std::string alt = (fs::path(train_dir(other)) / "best.ckpt").string();
      if (fs::exists(alt)) ckpt = alt;
    }
  }
  const std::string wdir = args.worlds.empty() ? worlds_dir(ctx) : args.worlds;
  const std::string dir = eval_dir(ctx, args.navigator);
  const std::string summary_path = (fs::path(dir) / "summary.json").string();
  require_writable(ctx, summary_path);

  CheckpointMeta meta;
  const Policy policy = load_checkpoint(ckpt, c.policy, ctx.force, &meta);
  if (meta.digest != c.policy.digest())
    warn(ctx, "checkpoint digest differs from the config; continuing because of --force");
  std::vector<std::string> names;
  const std::vector<WorldFile> worlds = load_worlds(ctx, wdir, &names);
  const std::vector<EvalItem> items = flatten(worlds);
  if (items.empty()) warn(ctx, "no episodes to evaluate");

  const EnvConfig env = c.eval_env(args.navigator);
  const std::vector<EpisodeResult> results = evaluate_policy(policy, items, env, c.threads);
  const std::vector<OracleTime> oracle = oracle_times(items, c.motion, c.oracle, c.threads);
  const std::vector<MetricsReport> rows = score(items, results, c.motion, &oracle);

  fs::create_directories(dir);
  write_file((fs::path(dir) / "metrics.csv").string(), metrics_csv(rows, artifact_stamp(c)));
  std::string log = stamp_json(c).dump() + "\n";
  {
    std::size_t k = 0;
    for (std::size_t w = 0; w < worlds.size(); ++w)
      for (std::size_t e = 0; e < worlds[w].episodes.size(); ++e, ++k)
        log += result_line(names[w], results[k]) + "\n";
  }
  write_file((fs::path(dir) / "results.jsonl").string(), log);

  const MetricsReport mean = mean_report(rows);
  double eet_success = 0.0;
  int n_success = 0;
  for (const auto& r : rows)
    if (r.SR > 0.0) {
      eet_success += r.EET;
      ++n_success;
    }
  const WaypointReport wp = waypoint_statistics(results);
  ordered_json summary = stamp_json(c);
  summary["checkpoint_digest"] = meta.digest;
  summary["expressivity"] = c.policy.expressivity.code();
  summary["navigator"] = to_string(args.navigator);
  summary["episodes"] = rows.size();
  summary["mean"] = report_json(mean);
  summary["successes"] = n_success;
  summary["mean_eet_success"] = n_success ? eet_success / n_success : 0.0;
  summary["waypoint_distance"] = {{"count", wp.count},
                                  {"mean", wp.mean},
                                  {"std", wp.std},
                                  {"phase_mean", wp.phase_mean},
                                  {"phase_count", wp.phase_count}};
  write_file(summary_path, summary.dump(2) + "\n");
  say(ctx, "SR " + format_double(mean.SR) + " SPL " + format_double(mean.SPL) + " SCT " +
               format_double(mean.SCT) + " over " + std::to_string(rows.size()) + " episodes -> " +
               dir);
  return summary_path;
}

std::string cmd_compare(const CliContext& ctx, const std::vector<std::string>& summaries,
                        const std::string& out_path) {
  std::string table = "# " + artifact_stamp(ctx.cfg) + "\n";
  table += "expressivity,navigator";
  for (auto col : kMetricColumns) table += "," + std::string(col);
  table += ",command_ratio\n";
  double reference_commands = 0.0;
  for (const auto& path : summaries) {
    ordered_json s;
    try {
      s = ordered_json::parse(read_file(path));
    } catch (const std::exception& e) {
      warn(ctx, "skipping " + path + ": " + e.what());
      continue;
    }
    if (!s.contains("mean") || !s.contains("expressivity") || !s.contains("navigator")) {
      warn(ctx, "skipping " + path + ": not an evaluation summary");
      continue;
    }
    const auto& m = s["mean"];
    table += s["expressivity"].get<std::string>() + "," + s["navigator"].get<std::string>();
    for (auto col : kMetricColumns) table += "," + format_double(m.at(std::string(col)).get<double>());
    const double cmds = m.at("n_commands").get<double>();
    if (reference_commands == 0.0) reference_commands = cmds;
    table += "," + format_double(reference_commands > 0.0 ? cmds / reference_commands : 0.0) + "\n";
  }
  if (!out_path.empty()) {
    require_writable(ctx, out_path);
    write_file(out_path, table);
  }
  return table;
}

std::string cmd_render(const CliContext& ctx, const std::string& results_path,
                       const std::string& worlds, const std::string& episode_id,
                       const std::string& out_path) {
  const std::string text = read_file(results_path);
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1) continue;  // provenance header
    ordered_json j;
    try {
      j = ordered_json::parse(line);
    } catch (const nlohmann::json::parse_error&) {
      throw ParseError(results_path + ": malformed result record", line_no);
    }
    if (j.value("episode", "") != episode_id) continue;
    try {
      const std::string wdir = worlds.empty() ? worlds_dir(ctx) : worlds;
      const WorldFile wf = load_world_file((fs::path(wdir) / j.at("world").get<std::string>()).string());
      EpisodeResult r;
      bool found = false;
      for (const auto& ep : wf.episodes)
        if (ep.id == episode_id) {
          r.episode = ep;
          found = true;
        }
      if (!found) throw ParseError("episode " + episode_id + " not in its world file", line_no);
      r.success = j.at("success").get<bool>();
      r.stopped = j.at("stopped").get<bool>();
      for (const auto& p : j.at("path")) r.path.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
      for (const auto& p : j.at("decisions"))
        r.decision_poses.push_back({p.at(0).get<double>(), p.at(1).get<double>(), p.at(2).get<double>()});
      const std::string svg = render_svg(wf.grid, r, artifact_stamp(ctx.cfg));
      if (!out_path.empty()) write_file(out_path, svg);
      return svg;
    } catch (const nlohmann::json::exception&) {
      throw ParseError(results_path + ": malformed result record", line_no);
    }
  }
  throw InvalidArgument("episode " + episode_id + " not found in " + results_path);
}

std::string cmd_plan(const CliContext& ctx, const std::string& world_path, int episode_index,
                     int rrt_iterations) {
  const WorldFile wf = load_world_file(world_path);
  if (episode_index < 0 || static_cast<std::size_t>(episode_index) >= wf.episodes.size())
    throw InvalidArgument("episode index out of range");
  const Episode& ep = wf.episodes[static_cast<std::size_t>(episode_index)];
  const OracleTime lattice =
      minimal_time_lattice(wf.grid, ep.start, ep.goal, ctx.cfg.motion, ctx.cfg.oracle);
  ordered_json j;
  j["episode"] = ep.id;
  j["lattice"] = lattice.T;
  RrtParams rp;
  rp.iterations = rrt_iterations;
  try {
    j["rrt_star"] = minimal_time_rrt(wf.grid, ep.start, ep.goal, ctx.cfg.motion,
                                     derive_seed(ctx.cfg.run_seed, static_cast<std::uint64_t>(episode_index)), rp)
                        .T;
  } catch (const PlannerIncomplete& e) {
    j["rrt_star"] = nullptr;
    j["rrt_partial"] = e.best_partial();
  }
  const std::string out = j.dump();
  say(ctx, out);
  return out;
}

}  // namespace wpnav
