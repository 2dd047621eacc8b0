#pragma once

#include <map>
#include <string>
#include <vector>

#include "wpnav/world/episode.hpp"
#include "wpnav/world/grid.hpp"

namespace wpnav {

inline constexpr int kWorldFormatVersion = 1;

// World file: versioned line-oriented text.
//
//   WPNAV-WORLD 1
//   meta <key> <value>          (zero or more)
//   resolution <meters>
//   size <width> <height>
//   rows
//   <run-length row>            (height lines, row 0 first; runs "<n>#" / "<n>.")
//   episodes <count>
//   <json episode record>       (count lines)
//   end
struct WorldFile {
  OccupancyGrid grid{1, 1, 1.0};
  std::vector<Episode> episodes;
  std::map<std::string, std::string> meta;
};

std::string encode_row(const OccupancyGrid& grid, int row);
std::string write_world_file(const WorldFile& file);
// Throws ParseError carrying the offending line number.
WorldFile parse_world_file(const std::string& text);

std::string episode_to_json_line(const Episode& ep);
Episode episode_from_json_line(const std::string& line, int line_no = 0);

WorldFile load_world_file(const std::string& path);
void save_world_file(const std::string& path, const WorldFile& file);

}  // namespace wpnav
