#pragma once

#include <string>
#include <vector>

#include "commons/types.hpp"

namespace commons::sim {

struct MetricRow {
  Epoch epoch{0};
  double gini{0};
  double participation{0};
  Amount treasury{0};

  friend bool operator==(const MetricRow&, const MetricRow&) = default;
};

// Gini over non-negative values; throws Empty or AllZero.
double gini(const std::vector<double>& values);

std::string report_csv(const json& report);
// SHA-256 hex of the canonical report without its content_hash field.
std::string content_hash(const json& report);
// Adds content_hash; returns the finished report.
json seal_report(json report);

// Per-metric deltas (b - a). Throws ScenarioMismatch on different names.
json compare(const json& a, const json& b);
bool diff_empty(const json& diff);
std::string format_diff(const json& diff);

}  // namespace commons::sim
