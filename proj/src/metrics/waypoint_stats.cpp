#include "wpnav/metrics/waypoint_stats.hpp"

#include <cmath>

namespace wpnav {

Phase phase_of(std::size_t k, std::size_t n) {
  const double pos = (static_cast<double>(k) + 0.5) / static_cast<double>(n);
  if (pos < 0.25) return Phase::early;
  if (pos >= 0.75) return Phase::late;
  return Phase::middle;
}

WaypointReport waypoint_statistics(const std::vector<std::vector<double>>& distances) {
  WaypointReport rep;
  double sum = 0.0;
  std::array<double, 3> phase_sum{};
  for (const auto& ep : distances) {
    for (std::size_t k = 0; k < ep.size(); ++k) {
      const auto p = static_cast<std::size_t>(phase_of(k, ep.size()));
      phase_sum[p] += ep[k];
      ++rep.phase_count[p];
      sum += ep[k];
      ++rep.count;
    }
  }
  if (rep.count == 0) return rep;
  rep.mean = sum / static_cast<double>(rep.count);
  double ss = 0.0;
  for (const auto& ep : distances)
    for (double d : ep) ss += (d - rep.mean) * (d - rep.mean);
  rep.std = std::sqrt(ss / static_cast<double>(rep.count));
  for (std::size_t p = 0; p < 3; ++p)
    if (rep.phase_count[p] > 0)
      rep.phase_mean[p] = phase_sum[p] / static_cast<double>(rep.phase_count[p]);
  return rep;
}

WaypointReport waypoint_statistics(const std::vector<EpisodeResult>& results) {
  std::vector<std::vector<double>> distances;
  distances.reserve(results.size());
  for (const auto& r : results) {
    auto& ep = distances.emplace_back();
    for (const auto& a : r.actions)
      if (!a.is_stop()) ep.push_back(a.distance);
  }
  return waypoint_statistics(distances);
}

}  // namespace wpnav
