#include "wpnav/world/world_io.hpp"

#include <fstream>
#include <json.hpp>
#include <sstream>

#include "wpnav/common/digest.hpp"
#include "wpnav/common/error.hpp"

namespace wpnav {
namespace {

using ojson = nlohmann::ordered_json;

double parse_number(const std::string& s, int line) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw ParseError("malformed number '" + s + "'", line);
    return v;
  } catch (const std::logic_error&) {
    throw ParseError("malformed number '" + s + "'", line);
  }
}

int parse_int(const std::string& s, int line) {
  try {
    std::size_t used = 0;
    const long v = std::stol(s, &used);
    if (used != s.size() || v < 0 || v > 1'000'000)
      throw ParseError("malformed integer '" + s + "'", line);
    return static_cast<int>(v);
  } catch (const std::logic_error&) {
    throw ParseError("malformed integer '" + s + "'", line);
  }
}

}  // namespace

std::string encode_row(const OccupancyGrid& grid, int row) {
  std::string out;
  int x = 0;
  while (x < grid.width()) {
    const bool b = grid.blocked(x, row);
    int run = 0;
    while (x < grid.width() && grid.blocked(x, row) == b) {
      ++run;
      ++x;
    }
    out += std::to_string(run);
    out += b ? '#' : '.';
  }
  return out;
}

std::string episode_to_json_line(const Episode& ep) {
  ojson j;
  j["id"] = ep.id;
  j["start"] = {ep.start.x, ep.start.y, ep.start.heading};
  j["goal"] = {ep.goal.x, ep.goal.y};
  ojson path = ojson::array();
  for (const Point& p : ep.shortest_path) path.push_back({p.x, p.y});
  j["path"] = std::move(path);
  j["tokens"] = ep.instruction;
  j["geodesic_length"] = ep.geodesic_length;
  j["success_distance"] = ep.success_distance;
  return j.dump();
}

Episode episode_from_json_line(const std::string& line, int line_no) {
  try {
    const ojson j = ojson::parse(line);
    Episode ep;
    ep.id = j.at("id").get<std::string>();
    const auto& s = j.at("start");
    if (s.size() != 3) throw ParseError("episode start must have 3 entries", line_no);
    ep.start = {s[0].get<double>(), s[1].get<double>(), s[2].get<double>()};
    const auto& g = j.at("goal");
    if (g.size() != 2) throw ParseError("episode goal must have 2 entries", line_no);
    ep.goal = {g[0].get<double>(), g[1].get<double>()};
    for (const auto& p : j.at("path")) {
      if (p.size() != 2) throw ParseError("path points must have 2 entries", line_no);
      ep.shortest_path.push_back({p[0].get<double>(), p[1].get<double>()});
    }
    ep.instruction = j.at("tokens").get<std::vector<int>>();
    ep.geodesic_length = j.at("geodesic_length").get<double>();
    ep.success_distance = j.at("success_distance").get<double>();
    return ep;
  } catch (const ParseError&) {
    throw;
  } catch (const std::exception& e) {
    throw ParseError(std::string("bad episode record: ") + e.what(), line_no);
  }
}

std::string write_world_file(const WorldFile& file) {
  std::string out = "WPNAV-WORLD " + std::to_string(kWorldFormatVersion) + "\n";
  for (const auto& [k, v] : file.meta) out += "meta " + k + " " + v + "\n";
  const OccupancyGrid& g = file.grid;
  out += "resolution " + format_double(g.resolution()) + "\n";
  out += "size " + std::to_string(g.width()) + " " + std::to_string(g.height()) + "\n";
  out += "rows\n";
  for (int y = 0; y < g.height(); ++y) out += encode_row(g, y) + "\n";
  out += "episodes " + std::to_string(file.episodes.size()) + "\n";
  for (const Episode& ep : file.episodes) out += episode_to_json_line(ep) + "\n";
  out += "end\n";
  return out;
}

WorldFile parse_world_file(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  auto next = [&]() -> std::string& {
    if (!std::getline(in, line)) throw ParseError("unexpected end of file", line_no + 1);
    ++line_no;
    return line;
  };
  auto split = [](const std::string& s) {
    std::vector<std::string> parts;
    std::istringstream ss(s);
    std::string tok;
    while (ss >> tok) parts.push_back(tok);
    return parts;
  };

  auto header = split(next());
  if (header.size() != 2 || header[0] != "WPNAV-WORLD")
    throw ParseError("missing WPNAV-WORLD header", line_no);
  if (parse_int(header[1], line_no) != kWorldFormatVersion)
    throw ParseError("unsupported world format version " + header[1], line_no);

  WorldFile file;
  auto parts = split(next());
  while (!parts.empty() && parts[0] == "meta") {
    if (parts.size() != 3) throw ParseError("meta lines are 'meta <key> <value>'", line_no);
    file.meta[parts[1]] = parts[2];
    parts = split(next());
  }
  if (parts.size() != 2 || parts[0] != "resolution")
    throw ParseError("expected 'resolution <meters>'", line_no);
  const double res = parse_number(parts[1], line_no);
  if (!(res > 0.0)) throw ParseError("resolution must be positive", line_no);

  parts = split(next());
  if (parts.size() != 3 || parts[0] != "size")
    throw ParseError("expected 'size <width> <height>'", line_no);
  const int w = parse_int(parts[1], line_no);
  const int h = parse_int(parts[2], line_no);
  if (w <= 0 || h <= 0) throw ParseError("grid dimensions must be positive", line_no);
  if (next() != "rows") throw ParseError("expected 'rows'", line_no);

  std::vector<std::uint8_t> cells(static_cast<std::size_t>(w) * static_cast<std::size_t>(h));
  for (int y = 0; y < h; ++y) {
    const std::string& row = next();
    int x = 0;
    std::size_t i = 0;
    while (i < row.size()) {
      std::size_t j = i;
      while (j < row.size() && row[j] >= '0' && row[j] <= '9') ++j;
      if (j == i || j >= row.size() || (row[j] != '#' && row[j] != '.'))
        throw ParseError("malformed run-length row", line_no);
      const int run = parse_int(row.substr(i, j - i), line_no);
      if (run == 0 || x + run > w) throw ParseError("row length does not match width", line_no);
      for (int k = 0; k < run; ++k)
        cells[static_cast<std::size_t>(y) * static_cast<std::size_t>(w) +
              static_cast<std::size_t>(x + k)] = row[j] == '#' ? 1 : 0;
      x += run;
      i = j + 1;
    }
    if (x != w) throw ParseError("row length does not match width", line_no);
  }
  file.grid = OccupancyGrid(w, h, res, std::move(cells));

  parts = split(next());
  if (parts.size() != 2 || parts[0] != "episodes")
    throw ParseError("expected 'episodes <count>'", line_no);
  const int n = parse_int(parts[1], line_no);
  for (int k = 0; k < n; ++k) file.episodes.push_back(episode_from_json_line(next(), line_no));
  if (next() != "end") throw ParseError("expected 'end'", line_no);
  return file;
}

WorldFile load_world_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ParseError("cannot open world file " + path, 0);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_world_file(ss.str());
}

void save_world_file(const std::string& path, const WorldFile& file) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot write world file " + path);
  f << write_world_file(file);
}

}  // namespace wpnav
