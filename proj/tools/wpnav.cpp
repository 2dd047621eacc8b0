// wpnav: world generation, training, evaluation, comparison, rendering and
// oracle planning for waypoint-navigation agents.

#include <iostream>

#include "CLI11.hpp"
#include "wpnav/cli/commands.hpp"
#include "wpnav/common/error.hpp"

namespace {

enum Exit { kOk = 0, kUsage = 1, kData = 2, kNumeric = 3 };

}  // namespace

int main(int argc, char** argv) {
  using namespace wpnav;
  CLI::App app{"Waypoint navigation experiments"};
  app.set_version_flag("--version", std::string("wpnav ") + kToolVersion);
  app.require_subcommand(1);

  std::string config_path, out_flag, expressivity, navigator;
  long long seed = -1;
  bool force = false;
  app.add_option("--config", config_path, "Experiment config (JSON)");
  app.add_option("--seed", seed, "Override the run seed");
  app.add_option("--out", out_flag, "Output directory (default $WPNAV_OUT or config output_dir)");
  app.add_option("--navigator", navigator, "Navigator")->check(CLI::IsMember({"cn", "dn"}));
  app.add_option("--expressivity", expressivity, "Action-space expressivity")
      ->check(CLI::IsMember({"cc", "dc", "dd", "dfixed", "fixedc", "fixedfixed"}));
  app.add_flag("--force", force, "Overwrite outputs and accept digest mismatches");

  auto* show = app.add_subcommand("config", "Print the effective config as JSON");
  auto* gen = app.add_subcommand("generate", "Generate test worlds and episodes");
  auto* trn = app.add_subcommand("train", "Train a policy with PPO");
  auto* evl = app.add_subcommand("evaluate", "Greedy evaluation with metrics");
  EvaluateArgs eval_args;
  evl->add_option("--checkpoint", eval_args.checkpoint, "Checkpoint (default: trained best)");
  evl->add_option("--worlds", eval_args.worlds, "World directory (default: <out>/worlds)");
  auto* cmp = app.add_subcommand("compare", "Table of evaluation summaries");
  std::vector<std::string> summaries;
  std::string table_out;
  cmp->add_option("summaries", summaries, "summary.json files")->required();
  cmp->add_option("--table", table_out, "Write the table to this file");
  auto* rnd = app.add_subcommand("render", "SVG map of one evaluated episode");
  std::string results_path, render_worlds, episode_id, svg_out;
  rnd->add_option("--results", results_path, "results.jsonl")->required();
  rnd->add_option("--episode", episode_id, "Episode id")->required();
  rnd->add_option("--worlds", render_worlds, "World directory");
  rnd->add_option("--svg", svg_out, "Output file (default: stdout)");
  auto* pln = app.add_subcommand("plan", "Oracle minimal time for an episode");
  std::string world_path;
  int episode_index = 0;
  int rrt_iterations = 3000;
  pln->add_option("--world", world_path, "World file")->required();
  pln->add_option("--episode-index", episode_index, "Episode index in the file");
  pln->add_option("--rrt-iterations", rrt_iterations, "RRT* iteration budget");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUsage;
  }

  try {
    CliContext ctx;
    if (!config_path.empty()) ctx.cfg = ExperimentConfig::load(config_path);
    if (seed >= 0) ctx.cfg.run_seed = static_cast<std::uint64_t>(seed);
    if (!expressivity.empty()) ctx.cfg.policy.expressivity = ExpressivityConfig::from_code(expressivity);
    if (!navigator.empty()) ctx.cfg.navigator = navigator_from_string(navigator);
    ctx.out_dir = resolve_out_dir(out_flag, ctx.cfg);
    ctx.force = force;
    ctx.out = &std::cout;
    ctx.err = &std::cerr;

    if (show->parsed()) {
      std::cout << ctx.cfg.to_json();
    } else if (gen->parsed()) {
      cmd_generate(ctx);
    } else if (trn->parsed()) {
      cmd_train(ctx);
    } else if (evl->parsed()) {
      eval_args.navigator = ctx.cfg.navigator;
      cmd_evaluate(ctx, eval_args);
    } else if (cmp->parsed()) {
      std::cout << cmd_compare(ctx, summaries, table_out);
    } else if (rnd->parsed()) {
      const std::string svg = cmd_render(ctx, results_path, render_worlds, episode_id, svg_out);
      if (svg_out.empty()) std::cout << svg;
    } else if (pln->parsed()) {
      CliContext quiet = ctx;
      quiet.out = nullptr;
      std::cout << cmd_plan(quiet, world_path, episode_index, rrt_iterations) << '\n';
    }
    return kOk;
  } catch (const InvalidArgument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const NumericError& e) {
    std::cerr << "numeric error: " << e.what() << '\n';
    return kNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kData;
  }
}
