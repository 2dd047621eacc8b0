#pragma once

// Independent reference computations shared by unit and acceptance tests.

#include <array>
#include <cmath>
#include <functional>
#include <vector>

#include "wpnav/actionspace/actions.hpp"
#include "wpnav/common/angles.hpp"
#include "wpnav/common/rng.hpp"
#include "wpnav/metrics/vln_metrics.hpp"
#include "wpnav/navigators/commands.hpp"
#include "wpnav/world/geodesic.hpp"

namespace oracle {

// Composite 5-point Gauss-Legendre quadrature.
inline double integrate(const std::function<double(double)>& f, double a, double b,
                        int panels = 2000) {
  static const double x[5] = {0.0, -0.5384693101056831, 0.5384693101056831,
                              -0.9061798459386640, 0.9061798459386640};
  static const double w[5] = {0.5688888888888889, 0.4786286704993665, 0.4786286704993665,
                              0.2369268850561891, 0.2369268850561891};
  const double h = (b - a) / panels;
  double total = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double mid = a + (p + 0.5) * h;
    for (int k = 0; k < 5; ++k) total += w[k] * f(mid + 0.5 * h * x[k]);
  }
  return total * 0.5 * h;
}

struct Moments {
  double mean = 0.0;
  double variance = 0.0;
};

// Truncated moments by rejection from the untruncated Gaussian.
inline Moments rejection_moments(double mu, double sigma, double lo, double hi, int n,
                                 std::uint64_t seed) {
  wpnav::Rng rng(seed);
  double s = 0.0, s2 = 0.0;
  int kept = 0;
  while (kept < n) {
    const double x = mu + sigma * rng.normal();
    if (x < lo || x > hi) continue;
    s += x;
    s2 += x * x;
    ++kept;
  }
  const double m = s / n;
  return {m, s2 / n - m * m};
}

inline std::vector<double> random_logits(wpnav::Rng& rng, int n, double scale = 2.0) {
  std::vector<double> v(n);
  for (double& x : v) x = rng.uniform(-scale, scale);
  return v;
}

// Head outputs for a configuration with random raw parameters.
inline wpnav::HeadOutputs random_heads(const wpnav::ExpressivityConfig& cfg, wpnav::Rng& rng) {
  using namespace wpnav;
  HeadOutputs h;
  h.pano = Categorical::from_logits(random_logits(rng, kPanoSize));
  for (int i = 0; i < kSectors; ++i) {
    switch (cfg.offset_mode) {
      case HeadMode::continuous:
        h.offset[i] = ComponentHead::continuous(
            map_offset_head(rng.uniform(-2, 2), rng.uniform(-2, 2)));
        break;
      case HeadMode::discrete:
        h.offset[i] = ComponentHead::discrete(
            Categorical::from_logits(random_logits(rng, discrete_offsets().size())),
            discrete_offsets());
        break;
      case HeadMode::fixed:
        h.offset[i] = ComponentHead::fixed(kFixedOffset);
        break;
    }
    switch (cfg.distance_mode) {
      case HeadMode::continuous:
        h.distance[i] = ComponentHead::continuous(
            map_distance_head(rng.uniform(-2, 2), rng.uniform(-2, 2)));
        break;
      case HeadMode::discrete:
        h.distance[i] = ComponentHead::discrete(
            Categorical::from_logits(random_logits(rng, discrete_distances().size())),
            discrete_distances());
        break;
      case HeadMode::fixed:
        h.distance[i] = ComponentHead::fixed(kFixedDistance);
        break;
    }
  }
  return h;
}

// Total mass of a component: atoms summed, densities integrated, constants 1.
inline double component_mass(const wpnav::ComponentHead& c,
                             const std::function<double(double)>& weight) {
  using namespace wpnav;
  switch (c.mode()) {
    case HeadMode::fixed:
      return weight(c.fixed_value());
    case HeadMode::discrete: {
      double s = 0.0;
      for (double a : c.atoms()) s += weight(a);
      return s;
    }
    case HeadMode::continuous: {
      const auto& g = c.gaussian();
      return integrate(weight, g.lower, g.upper, 120);
    }
  }
  return 0.0;
}

// Sum/integral of exp(joint_logprob) over the whole action space.
inline double joint_mass(const wpnav::HeadOutputs& h) {
  using namespace wpnav;
  double total = std::exp(joint_logprob(h, WaypointAction::stop()));
  for (int i = 0; i < kSectors; ++i) {
    total += component_mass(h.offset[i], [&](double o) {
      return component_mass(h.distance[i], [&](double d) {
        return std::exp(joint_logprob(h, WaypointAction{i, o, d}));
      });
    });
  }
  return total;
}

// Closed rectangular room of w x h interior cells.
inline wpnav::OccupancyGrid closed_room(int w, int h, double res) {
  wpnav::OccupancyGrid g(w + 2, h + 2, res, false);
  for (int x = 0; x < w + 2; ++x) {
    g.set_blocked(x, 0, true);
    g.set_blocked(x, h + 1, true);
  }
  for (int y = 0; y < h + 2; ++y) {
    g.set_blocked(0, y, true);
    g.set_blocked(w + 1, y, true);
  }
  return g;
}

inline wpnav::Point random_free_point(const wpnav::OccupancyGrid& g, wpnav::Rng& rng) {
  for (;;) {
    const wpnav::Point p{rng.uniform(0.0, g.width_m()), rng.uniform(0.0, g.height_m())};
    if (g.is_free_point(p)) return p;
  }
}

// Random trajectory with a consistent command stream. Success is drawn
// independently of geometry so every metric branch is exercised.
inline wpnav::EpisodeResult random_episode(const wpnav::OccupancyGrid& g, wpnav::Rng& rng) {
  using namespace wpnav;
  EpisodeResult r;
  r.episode.start = Pose{0, 0, 0};
  const Point s = random_free_point(g, rng);
  r.episode.start = Pose{s.x, s.y, rng.uniform(0.0, kTwoPi)};
  r.episode.goal = random_free_point(g, rng);
  r.episode.success_distance = rng.uniform(0.2, 1.5);
  r.episode.geodesic_length = geodesic_distance(g, s, r.episode.goal);
  r.path.push_back(s);
  double heading = r.episode.start.heading;
  const int legs = 1 + static_cast<int>(rng.below(6));
  for (int i = 0; i < legs; ++i) {
    const Point p = random_free_point(g, rng);
    const Point d = p - r.path.back();
    const double bearing = std::atan2(d.y, d.x);
    r.commands.push_back(Command::rotate(wpnav::wrap_pi(bearing - heading)));
    r.commands.push_back(Command::translate(norm(d)));
    heading = bearing;
    r.path.push_back(p);
  }
  r.final_position = r.path.back();
  r.stopped = rng.uniform() < 0.7;
  r.success = r.stopped && rng.uniform() < 0.5;
  if (r.stopped) r.commands.push_back(Command::stop());
  return r;
}

}  // namespace oracle
