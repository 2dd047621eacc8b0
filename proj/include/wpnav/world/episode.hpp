#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "wpnav/world/grid.hpp"

namespace wpnav {

// Fixed template vocabulary; ids are dense 0..size-1.
class Vocabulary {
 public:
  enum Token : int {
    kGo = 0,
    kForward,
    kTurn,
    kLeft,
    kRight,
    kSlight,
    kAround,
    kThen,
    kStop,
    kCount
  };

  static constexpr int size() { return kCount; }
  static std::string_view word(int id);
  // -1 for unknown words.
  static int id(std::string_view word);
  static std::string render(const std::vector<int>& tokens);
  static bool valid(int id) { return id >= 0 && id < kCount; }
};

struct EpisodeParams {
  double min_geodesic_m = 1.0;
  double max_geodesic_m = 8.0;
  double success_distance = 0.5;
  double clearance_m = 0.2;
  int max_retries = 200;
};

struct Episode {
  std::string id;
  Pose start;
  Point goal;
  std::vector<Point> shortest_path;
  double geodesic_length = 0.0;
  std::vector<int> instruction;
  double success_distance = 0.5;

  friend bool operator==(const Episode&, const Episode&) = default;
};

// Templated instruction for a path: segment turns are classified by heading
// change (|d| < 20 deg none, < 60 slight, < 135 turn, otherwise around).
std::vector<int> instruction_for_path(const OccupancyGrid& grid,
                                      const std::vector<Point>& path);

// Line-of-sight simplification of a cell-center polyline.
std::vector<Point> simplify_path(const OccupancyGrid& grid, const std::vector<Point>& path);

// Throws SamplingError when no start/goal pair satisfies the geodesic bounds.
Episode generate_episode(const OccupancyGrid& grid, std::uint64_t seed,
                         const EpisodeParams& params, std::string id = "");

}  // namespace wpnav
