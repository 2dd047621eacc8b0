#include "wpnav/trainer/evaluate.hpp"

#include <exception>
#include <thread>

#include "wpnav/common/error.hpp"

namespace wpnav {
namespace {

// Runs f(i) for i in [0, n) on up to `threads` threads; rethrows the first
// failure by index.
template <class F>
void parallel_for(std::size_t n, int threads, F f) {
  if (threads <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::vector<std::exception_ptr> errors(n);
  std::vector<std::thread> pool;
  const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(threads), n);
  for (std::size_t w = 0; w < k; ++w)
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < n; i += k) {
        try {
          f(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace

EpisodeResult run_episode(const Policy& policy, const OccupancyGrid& grid, const Episode& episode,
                          const EnvConfig& cfg) {
  NavEnv env(grid, episode, policy.config(), cfg);
  PolicyState state = PolicyState::initial(policy.config());
  while (!env.done()) {
    const Observation obs = env.observe();
    const PolicyOutput out = policy.act(obs, state);
    const WaypointAction a = mode_action(head_outputs(out, policy.config().expressivity));
    env.step(a);
    state = policy.advance(out, obs, a);
  }
  return env.result();
}

std::vector<EvalItem> flatten(const std::vector<WorldFile>& worlds) {
  std::vector<EvalItem> items;
  for (const auto& w : worlds)
    for (const auto& ep : w.episodes) items.push_back({&w.grid, &ep});
  return items;
}

std::vector<EpisodeResult> evaluate_policy(const Policy& policy, const std::vector<EvalItem>& items,
                                           const EnvConfig& cfg, int threads) {
  std::vector<EpisodeResult> results(items.size());
  parallel_for(items.size(), threads, [&](std::size_t i) {
    results[i] = run_episode(policy, *items[i].grid, *items[i].episode, cfg);
  });
  return results;
}

std::vector<OracleTime> oracle_times(const std::vector<EvalItem>& items, const MotionModel& m,
                                     const LatticeParams& params, int threads) {
  std::vector<OracleTime> out(items.size());
  parallel_for(items.size(), threads, [&](std::size_t i) {
    out[i] = minimal_time_lattice(*items[i].grid, items[i].episode->start, items[i].episode->goal,
                                  m, params);
  });
  return out;
}

std::vector<MetricsReport> score(const std::vector<EvalItem>& items,
                                 const std::vector<EpisodeResult>& results, const MotionModel& m,
                                 const std::vector<OracleTime>* oracle) {
  if (items.size() != results.size() || (oracle && oracle->size() != items.size()))
    throw InvalidArgument("score: mismatched episode, result and oracle counts");
  std::vector<MetricsReport> rows;
  rows.reserve(results.size());
  for (std::size_t i = 0; i < results.size(); ++i) {
    const OracleTime t = oracle ? (*oracle)[i] : OracleTime{0.0, PlannerKind::lattice_dijkstra};
    rows.push_back(full_report(results[i], *items[i].grid, t, m));
  }
  return rows;
}

}  // namespace wpnav
