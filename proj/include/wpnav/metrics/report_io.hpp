#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "wpnav/metrics/vln_metrics.hpp"

namespace wpnav {

inline constexpr std::array<std::string_view, 9> kMetricColumns = {
    "TL", "NE", "OS", "SR", "SPL", "EET", "SCT", "n_commands", "speed"};

std::array<double, 9> metric_values(const MetricsReport& r);
MetricsReport metrics_from_values(const std::array<double, 9>& v);

// Header line plus one row per report, in kMetricColumns order. A non-empty
// comment is emitted first as a "# ..." line.
std::string metrics_csv(const std::vector<MetricsReport>& rows, const std::string& comment = "");
// Inverse of metrics_csv ("#" lines are skipped); throws ParseError with the
// 1-based line number.
std::vector<MetricsReport> parse_metrics_csv(const std::string& text);

}  // namespace wpnav
