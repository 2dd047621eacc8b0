#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "wpnav/cli/commands.hpp"
#include "wpnav/cli/render.hpp"
#include "wpnav/common/error.hpp"
#include "wpnav/metrics/report_io.hpp"

using namespace wpnav;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

void spit(const fs::path& p, const std::string& text) {
  std::ofstream f(p, std::ios::binary);
  f << text;
}

ExperimentConfig tiny_config() {
  ExperimentConfig c;
  c.world.layout = Layout::open_room;
  c.world.width_m = 5.0;
  c.world.height_m = 5.0;
  c.episodes.min_geodesic_m = 1.0;
  c.episodes.max_geodesic_m = 3.5;
  c.policy.feature_dim = 6;
  c.policy.vis_hidden = 6;
  c.policy.act_hidden = 6;
  c.policy.embed_dim = 3;
  c.ppo.n_envs = 2;
  c.ppo.rollout_length = 8;
  c.env.max_steps = 5;
  c.train_worlds = 2;
  c.val_worlds = 1;
  c.val_episodes_per_world = 2;
  c.test_worlds = 2;
  c.test_episodes_per_world = 2;
  c.total_steps = 32;
  c.eval_every = 1;
  return c;
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

CliContext context(const fs::path& out) {
  CliContext ctx;
  ctx.cfg = tiny_config();
  ctx.out_dir = out.string();
  return ctx;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(WPNAV_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("config json round trip") {
  const ExperimentConfig c = tiny_config();
  const ExperimentConfig back = ExperimentConfig::from_json(c.to_json());
  CHECK(back.to_json() == c.to_json());
  CHECK(back.digest() == c.digest());

  ExperimentConfig other = c;
  other.output_dir = "elsewhere";
  other.threads = 4;
  CHECK(other.digest() == c.digest());
  other.ppo.clip = 0.3;
  CHECK(other.digest() != c.digest());
  CHECK(other.world_digest() == c.world_digest());
  other.world.width_m = 6.0;
  CHECK(other.world_digest() != c.world_digest());

  CHECK_THROWS_AS(ExperimentConfig::from_json("{\"no_such_key\": 1}"), ParseError);
  CHECK_THROWS_AS(ExperimentConfig::from_json("{\"ppo\": {\"clip\": \"wide\"}}"), ParseError);
  CHECK_THROWS_AS(ExperimentConfig::from_json("{"), ParseError);
  const ExperimentConfig partial = ExperimentConfig::from_json("{\"seeds\": {\"run\": 9}}");
  CHECK(partial.run_seed == 9);
  CHECK(partial.total_steps == ExperimentConfig().total_steps);
}

TEST_CASE("output directory resolution") {
  ExperimentConfig c;
  c.output_dir = "from_config";
  ::unsetenv("WPNAV_OUT");
  CHECK(resolve_out_dir("", c) == "from_config");
  ::setenv("WPNAV_OUT", "from_env", 1);
  CHECK(resolve_out_dir("", c) == "from_env");
  CHECK(resolve_out_dir("from_flag", c) == "from_flag");
  ::unsetenv("WPNAV_OUT");
}

TEST_CASE("generate, train, evaluate, compare and render") {
  TempDir a("wpnav_cli_a"), b("wpnav_cli_b");
  CliContext ca = context(a.path), cb = context(b.path);

  const auto files = cmd_generate(ca);
  REQUIRE(files.size() == 2);
  cmd_generate(cb);
  for (const auto& f : files) {
    const fs::path rel = fs::relative(f, a.path);
    CHECK(slurp(f) == slurp(b.path / rel));
  }
  CHECK_THROWS_AS(cmd_generate(ca), Error);
  ca.force = true;
  CHECK_NOTHROW(cmd_generate(ca));
  ca.force = false;

  const std::string ckpt = cmd_train(ca);
  CHECK(fs::exists(ckpt));
  CHECK(fs::exists(fs::path(train_dir(ca)) / "train_log.csv"));

  EvaluateArgs args;
  const std::string summary = cmd_evaluate(ca, args);
  const std::string csv1 = slurp(fs::path(eval_dir(ca, NavigatorKind::continuous)) / "metrics.csv");
  CHECK(parse_metrics_csv(csv1).size() == 4);
  ca.force = true;
  cmd_evaluate(ca, args);
  CHECK(slurp(fs::path(eval_dir(ca, NavigatorKind::continuous)) / "metrics.csv") == csv1);

  // The same checkpoint under the discrete navigator.
  args.navigator = NavigatorKind::discrete;
  const std::string dn_summary = cmd_evaluate(ca, args);
  ca.force = false;
  const auto s = nlohmann::json::parse(slurp(dn_summary));
  CHECK(s["navigator"] == "dn");
  CHECK(s["episodes"] == 4);

  const std::string table = cmd_compare(ca, {summary, dn_summary, (a.path / "missing.json").string()}, "");
  std::istringstream lines(table);
  std::string line;
  int n = 0;
  while (std::getline(lines, line)) ++n;
  CHECK(n == 4);  // stamp, header, two rows
  CHECK(table.find("\ncc,cn,") != std::string::npos);
  CHECK(table.find("\ncc,dn,") != std::string::npos);

  // Render the first logged episode; one marker per decision.
  const fs::path results = fs::path(eval_dir(ca, NavigatorKind::continuous)) / "results.jsonl";
  std::istringstream log(slurp(results));
  std::getline(log, line);
  std::getline(log, line);
  const auto rec = nlohmann::json::parse(line);
  const std::string id = rec["episode"];
  const std::string svg = cmd_render(ca, results.string(), "", id, "");
  CHECK(svg == cmd_render(ca, results.string(), "", id, ""));
  std::size_t markers = 0;
  for (std::size_t pos = 0; (pos = svg.find("class=\"waypoint\"", pos)) != std::string::npos; ++pos)
    ++markers;
  CHECK(markers == rec["decisions"].size());
  CHECK(svg.find("id=\"goal\"") != std::string::npos);
  CHECK_THROWS_AS(cmd_render(ca, results.string(), "", "nope", ""), InvalidArgument);

  const fs::path broken = a.path / "broken.jsonl";
  spit(broken, "{}\n{\"episode\": \"x\"}\nnot json\n");
  try {
    cmd_render(ca, broken.string(), "", id, "");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
  }

  const std::string plan = cmd_plan(ca, files.front(), 0, 300);
  const auto pj = nlohmann::json::parse(plan);
  CHECK(pj["lattice"].get<double>() > 0.0);
  CHECK_THROWS_AS(cmd_plan(ca, files.front(), 99, 300), InvalidArgument);
}

TEST_CASE("empty world set gives a header-only csv") {
  TempDir d("wpnav_cli_empty");
  CliContext ctx = context(d.path);
  fs::create_directories(worlds_dir(ctx));
  nlohmann::json manifest;
  manifest["world_digest"] = ctx.cfg.world_digest();
  manifest["files"] = nlohmann::json::array();
  spit(fs::path(worlds_dir(ctx)) / "manifest.json", manifest.dump());
  cmd_train(ctx);
  cmd_evaluate(ctx, EvaluateArgs{});
  const std::string csv = slurp(fs::path(eval_dir(ctx, NavigatorKind::continuous)) / "metrics.csv");
  CHECK(parse_metrics_csv(csv).empty());
  CHECK(csv.find("TL,NE,OS,SR,SPL,EET,SCT,n_commands,speed") != std::string::npos);

  // A world set from another configuration is refused unless forced.
  ctx.cfg.world.width_m = 6.0;
  ctx.force = true;
  CHECK_NOTHROW(cmd_evaluate(ctx, EvaluateArgs{}));
  ctx.force = false;
  CHECK_THROWS_AS(cmd_evaluate(ctx, EvaluateArgs{}), Error);
}

TEST_CASE("binary exit codes") {
  TempDir d("wpnav_cli_bin");
  CHECK(run_cli("--version") == 0);
  CHECK(run_cli("--no-such-flag") == 1);
  CHECK(run_cli("--expressivity zz config") == 1);
  CHECK(run_cli("--out " + d.path.string() + " evaluate --checkpoint " +
                (d.path / "none.ckpt").string()) == 2);
  const fs::path cfg = d.path / "bad.json";
  spit(cfg, "{\"bogus\": true}");
  CHECK(run_cli("--config " + cfg.string() + " config") != 0);
}
