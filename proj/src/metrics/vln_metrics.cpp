#include "wpnav/metrics/vln_metrics.hpp"

#include <algorithm>

#include "wpnav/common/error.hpp"
#include "wpnav/world/geodesic.hpp"

namespace wpnav {

MetricsReport vln_metrics(const EpisodeResult& r, const OccupancyGrid& grid,
                          DistanceMode mode) {
  MetricsReport m;
  m.TL = polyline_length(r.path);
  const Episode& ep = r.episode;
  if (mode == DistanceMode::geodesic) {
    const DistanceField field(grid, ep.goal);
    m.NE = field.at(r.final_position);
    for (const Point& p : r.path)
      if (field.at(p) <= ep.success_distance) m.OS = 1.0;
  } else {
    m.NE = distance(r.final_position, ep.goal);
    for (const Point& p : r.path)
      if (distance(p, ep.goal) <= ep.success_distance) m.OS = 1.0;
  }
  m.SR = r.success ? 1.0 : 0.0;
  // The stop position belongs to the trajectory.
  m.OS = std::max(m.OS, m.SR);
  const double ell = ep.geodesic_length;
  m.SPL = m.SR * (ell > 0.0 ? ell / std::max(m.TL, ell) : 1.0);
  return m;
}

double sct(const EpisodeResult& r, const OracleTime& t_oracle, const MotionModel& m) {
  if (!(t_oracle.T > 0.0)) throw InvalidArgument("oracle time must be positive");
  if (!r.success) return 0.0;
  const double c = eet(r.commands, m);
  return t_oracle.T / std::max(c, t_oracle.T);
}

int count_commands(const std::vector<Command>& commands) {
  return static_cast<int>(std::count_if(commands.begin(), commands.end(),
                                        [](const Command& c) { return !c.is_stop(); }));
}

MetricsReport full_report(const EpisodeResult& r, const OccupancyGrid& grid,
                          const OracleTime& t_oracle, const MotionModel& m,
                          DistanceMode mode) {
  MetricsReport out = vln_metrics(r, grid, mode);
  out.EET = eet(r.commands, m);
  out.SCT = t_oracle.T > 0.0 ? sct(r, t_oracle, m) : 0.0;
  out.n_commands = count_commands(r.commands);
  out.speed = out.EET > 0.0 ? out.TL / out.EET : 0.0;
  return out;
}

MetricsReport mean_report(const std::vector<MetricsReport>& rows) {
  MetricsReport m;
  if (rows.empty()) return m;
  for (const auto& r : rows) {
    m.TL += r.TL;
    m.NE += r.NE;
    m.OS += r.OS;
    m.SR += r.SR;
    m.SPL += r.SPL;
    m.EET += r.EET;
    m.SCT += r.SCT;
    m.n_commands += r.n_commands;
    m.speed += r.speed;
  }
  const double n = static_cast<double>(rows.size());
  m.TL /= n;
  m.NE /= n;
  m.OS /= n;
  m.SR /= n;
  m.SPL /= n;
  m.EET /= n;
  m.SCT /= n;
  m.n_commands /= n;
  m.speed /= n;
  return m;
}

}  // namespace wpnav
