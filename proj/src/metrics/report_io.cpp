#include "wpnav/metrics/report_io.hpp"

#include <charconv>
#include <sstream>

#include "wpnav/common/digest.hpp"
#include "wpnav/common/error.hpp"

namespace wpnav {

std::array<double, 9> metric_values(const MetricsReport& r) {
  return {r.TL, r.NE, r.OS, r.SR, r.SPL, r.EET, r.SCT, r.n_commands, r.speed};
}

MetricsReport metrics_from_values(const std::array<double, 9>& v) {
  return {v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7], v[8]};
}

std::string metrics_csv(const std::vector<MetricsReport>& rows, const std::string& comment) {
  std::string out;
  if (!comment.empty()) out += "# " + comment + "\n";
  for (std::size_t i = 0; i < kMetricColumns.size(); ++i) {
    if (i) out += ',';
    out += kMetricColumns[i];
  }
  out += '\n';
  for (const auto& r : rows) {
    const auto v = metric_values(r);
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (i) out += ',';
      out += format_double(v[i]);
    }
    out += '\n';
  }
  return out;
}

std::vector<MetricsReport> parse_metrics_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  bool header = false;
  std::vector<MetricsReport> rows;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line[0] == '#') continue;
    if (!header) {
      header = true;
      std::string expected;
      for (std::size_t i = 0; i < kMetricColumns.size(); ++i) {
        if (i) expected += ',';
        expected += kMetricColumns[i];
      }
      if (line != expected) throw ParseError("unexpected metrics header", lineno);
      continue;
    }
    if (line.empty()) continue;
    std::array<double, 9> v{};
    std::size_t pos = 0;
    for (std::size_t i = 0; i < v.size(); ++i) {
      const std::size_t end = i + 1 < v.size() ? line.find(',', pos) : line.size();
      if (end == std::string::npos) throw ParseError("too few metric columns", lineno);
      const auto [p, ec] = std::from_chars(line.data() + pos, line.data() + end, v[i]);
      if (ec != std::errc() || p != line.data() + end)
        throw ParseError("bad metric value", lineno);
      pos = end + 1;
    }
    rows.push_back(metrics_from_values(v));
  }
  if (!header) throw ParseError("missing metrics header", lineno + 1);
  return rows;
}

}  // namespace wpnav
