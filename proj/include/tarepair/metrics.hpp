#pragma once

// Precision / recall / F1 over per-kind issue counts.

#include <string>
#include <vector>

#include <json.hpp>

#include "tarepair/error.hpp"

namespace tarepair::metrics {

struct Counts {
  long ni = 0;  // issues present
  long n = 0;   // issues reported
  long tp = 0;  // true positives
};

struct Row {
  std::string kind;
  Counts counts;
  double precision = 0;  // percent, 2 decimals
  double recall = 0;     // percent, 2 decimals
  double f1 = 0;         // fraction, 2 decimals
};

struct MetricsReport {
  std::vector<Row> rows;  // per kind, then "Total"
};

class InvalidCounts : public Error {
 public:
  explicit InvalidCounts(const std::string& m) : Error("InvalidCounts", m) {}
};

double round2(double v);

// Precision is 0 when nothing was reported; recall is 0 when NI is 0.
Row compute(const std::string& kind, const Counts& c);

// Rows per kind in input order plus a summed "Total" row.
MetricsReport cmd_metrics(const std::vector<std::pair<std::string, Counts>>& per_kind);

// `{"kinds": {"<kind>": {"NI":..,"N":..,"TP":..}, ...}}` or a list of
// `{"kind":..,"NI":..,"N":..,"TP":..}` objects. Kinds keep document order
// only when parsed as ordered_json.
std::vector<std::pair<std::string, Counts>> parse_counts(const nlohmann::json& j);
std::vector<std::pair<std::string, Counts>> parse_counts(const nlohmann::ordered_json& j);

nlohmann::json to_json(const MetricsReport& r);
std::string to_text(const MetricsReport& r);

}  // namespace tarepair::metrics
