#include "wpnav/cli/render.hpp"

#include <cmath>
#include <sstream>


namespace wpnav {
namespace {

constexpr double kScale = 40.0;  // pixels per meter

std::string num(double v) {
  // Fixed two decimals keeps the markup compact and stable.
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

}  // namespace

std::string render_svg(const OccupancyGrid& grid, const EpisodeResult& result,
                       const std::string& comment) {
  const double w = grid.width_m() * kScale;
  const double h = grid.height_m() * kScale;
  // World y grows upwards; SVG y grows downwards.
  auto px = [&](Point p) { return num(p.x * kScale) + "," + num(h - p.y * kScale); };
  const double cell = grid.resolution() * kScale;

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(w) << "\" height=\"" << num(h)
     << "\" viewBox=\"0 0 " << num(w) << " " << num(h) << "\">\n";
  if (!comment.empty()) os << "<!-- " << comment << " -->\n";
  os << "<rect x=\"0\" y=\"0\" width=\"" << num(w) << "\" height=\"" << num(h)
     << "\" fill=\"#d0d0d0\"/>\n";
  os << "<g id=\"obstacles\" fill=\"#303030\">\n";
  for (int cy = 0; cy < grid.height(); ++cy) {
    int cx = 0;
    while (cx < grid.width()) {
      if (!grid.blocked(cx, cy)) {
        ++cx;
        continue;
      }
      const int start = cx;
      while (cx < grid.width() && grid.blocked(cx, cy)) ++cx;
      os << "<rect x=\"" << num(start * cell) << "\" y=\"" << num(h - (cy + 1) * cell)
         << "\" width=\"" << num((cx - start) * cell) << "\" height=\"" << num(cell) << "\"/>\n";
    }
  }
  os << "</g>\n";

  const Episode& ep = result.episode;
  const double sq = 0.3 * kScale;
  auto square = [&](Point p, const char* id, const char* color) {
    os << "<rect id=\"" << id << "\" x=\"" << num(p.x * kScale - sq / 2) << "\" y=\""
       << num(h - p.y * kScale - sq / 2) << "\" width=\"" << num(sq) << "\" height=\"" << num(sq)
       << "\" fill=\"" << color << "\"/>\n";
  };
  square(ep.start.position(), "start", "#1f4fd6");
  square(ep.goal, "goal", "#d61f1f");
  os << "<circle id=\"success-radius\" cx=\"" << num(ep.goal.x * kScale) << "\" cy=\""
     << num(h - ep.goal.y * kScale) << "\" r=\"" << num(ep.success_distance * kScale)
     << "\" fill=\"none\" stroke=\"#d61f1f\" stroke-dasharray=\"4 3\"/>\n";

  os << "<polyline id=\"path\" fill=\"none\" stroke=\"#f0a000\" stroke-width=\"2\" points=\"";
  for (std::size_t i = 0; i < result.path.size(); ++i) os << (i ? " " : "") << px(result.path[i]);
  os << "\"/>\n";

  os << "<g id=\"waypoints\" stroke=\"#106010\" fill=\"#20a020\">\n";
  for (const Pose& p : result.decision_poses) {
    const Point tip{p.x + 0.35 * std::cos(p.heading), p.y + 0.35 * std::sin(p.heading)};
    os << "<g class=\"waypoint\"><circle cx=\"" << num(p.x * kScale) << "\" cy=\""
       << num(h - p.y * kScale) << "\" r=\"4\"/><line x1=\"" << num(p.x * kScale) << "\" y1=\""
       << num(h - p.y * kScale) << "\" x2=\"" << num(tip.x * kScale) << "\" y2=\""
       << num(h - tip.y * kScale) << "\" stroke-width=\"2\"/></g>\n";
  }
  os << "</g>\n</svg>\n";
  return os.str();
}

}  // namespace wpnav
