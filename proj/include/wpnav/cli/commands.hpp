#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "wpnav/cli/config.hpp"

namespace wpnav {

struct CliContext {
  ExperimentConfig cfg;
  std::string out_dir;
  bool force = false;
  std::ostream* out = nullptr;  // progress and results; null silences
  std::ostream* err = nullptr;  // warnings; null silences
};

// --out flag, then $WPNAV_OUT, then the config's output_dir.
std::string resolve_out_dir(const std::string& flag, const ExperimentConfig& cfg);

// "# wpnav <version> config <digest>"-style provenance text.
std::string artifact_stamp(const ExperimentConfig& cfg);

std::string worlds_dir(const CliContext& ctx);
std::string train_dir(const CliContext& ctx);
std::string eval_dir(const CliContext& ctx, NavigatorKind nav);

// Test-split worlds and episodes under <out>/worlds plus manifest.json.
// Returns the written world file paths.
std::vector<std::string> cmd_generate(const CliContext& ctx);

// Trains into <out>/train-<expressivity>-<navigator>; returns the best
// checkpoint path.
std::string cmd_train(const CliContext& ctx);

struct EvaluateArgs {
  std::string checkpoint;  // default: <train dir>/best.ckpt
  std::string worlds;      // default: <out>/worlds
  NavigatorKind navigator = NavigatorKind::continuous;
};
// Greedy evaluation into <out>/eval-<expressivity>-<navigator>: metrics.csv,
// results.jsonl and summary.json. Returns the summary path.
std::string cmd_evaluate(const CliContext& ctx, const EvaluateArgs& args);

// One row per evaluation summary; unreadable summaries are skipped with a
// warning. Returns the table text (also written to out_path when non-empty).
std::string cmd_compare(const CliContext& ctx, const std::vector<std::string>& summaries,
                        const std::string& out_path);

// SVG for one episode of a results.jsonl log.
std::string cmd_render(const CliContext& ctx, const std::string& results_path,
                       const std::string& worlds, const std::string& episode_id,
                       const std::string& out_path);

// Lattice and RRT* minimal times for one episode; returns a JSON line.
std::string cmd_plan(const CliContext& ctx, const std::string& world_path, int episode_index,
                     int rrt_iterations);

}  // namespace wpnav
