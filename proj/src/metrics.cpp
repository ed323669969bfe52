#include "tarepair/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace tarepair::metrics {

double round2(double v) { return std::round(v * 100.0) / 100.0; }

Row compute(const std::string& kind, const Counts& c) {
  if (c.ni < 0 || c.n < 0 || c.tp < 0) throw InvalidCounts(kind + ": counts must be non-negative");
  if (c.tp > c.n) throw InvalidCounts(kind + ": TP exceeds N");
  if (c.tp > c.ni) throw InvalidCounts(kind + ": TP exceeds NI");
  Row r;
  r.kind = kind;
  r.counts = c;
  // One division of exact integers per cell, so halves round exactly.
  auto ratio = [](long num, long den, double scale) {
    return den == 0 ? 0.0 : round2(static_cast<double>(num) * scale / static_cast<double>(den));
  };
  r.precision = ratio(c.tp, c.n, 100.0);
  r.recall = ratio(c.tp, c.ni, 100.0);
  // 2PR / (P + R) reduces to 2 TP / (N + NI); both terms are 0 iff TP is 0.
  r.f1 = c.tp == 0 ? 0.0 : ratio(2 * c.tp, c.n + c.ni, 1.0);
  return r;
}

MetricsReport cmd_metrics(const std::vector<std::pair<std::string, Counts>>& per_kind) {
  MetricsReport rep;
  Counts total;
  for (const auto& [kind, c] : per_kind) {
    rep.rows.push_back(compute(kind, c));
    total.ni += c.ni;
    total.n += c.n;
    total.tp += c.tp;
  }
  rep.rows.push_back(compute("Total", total));
  return rep;
}

namespace {

template <class Json>
std::vector<std::pair<std::string, Counts>> parse_any(const Json& j) {
  std::vector<std::pair<std::string, Counts>> out;
  auto one = [](const Json& o) {
    return Counts{o.at("NI").template get<long>(), o.at("N").template get<long>(), o.at("TP").template get<long>()};
  };
  try {
    if (j.is_array()) {
      for (const auto& o : j) out.emplace_back(o.at("kind").template get<std::string>(), one(o));
    } else {
      for (const auto& [k, v] : j.at("kinds").items()) out.emplace_back(k, one(v));
    }
  } catch (const nlohmann::json::exception& e) {
    throw InvalidCounts(std::string("malformed counts: ") + e.what());
  }
  return out;
}

}  // namespace

std::vector<std::pair<std::string, Counts>> parse_counts(const nlohmann::json& j) { return parse_any(j); }
std::vector<std::pair<std::string, Counts>> parse_counts(const nlohmann::ordered_json& j) { return parse_any(j); }

nlohmann::json to_json(const MetricsReport& r) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : r.rows)
    rows.push_back({{"kind", row.kind},
                    {"NI", row.counts.ni},
                    {"N", row.counts.n},
                    {"TP", row.counts.tp},
                    {"precision", row.precision},
                    {"recall", row.recall},
                    {"f1", row.f1}});
  return {{"rows", rows}, {"note", "precision is 0 when N is 0; recall is 0 when NI is 0"}};
}

std::string to_text(const MetricsReport& r) {
  std::ostringstream o;
  char buf[160];
  std::snprintf(buf, sizeof buf, "%-32s %5s %5s %5s %8s %8s %5s\n", "kind", "NI", "N", "TP", "P(%)", "R(%)", "F1");
  o << buf;
  for (const auto& row : r.rows) {
    std::snprintf(buf, sizeof buf, "%-32s %5ld %5ld %5ld %8.2f %8.2f %5.2f\n", row.kind.c_str(), row.counts.ni,
                  row.counts.n, row.counts.tp, row.precision, row.recall, row.f1);
    o << buf;
  }
  o << "P is 0 when N is 0.\n";
  return o.str();
}

}  // namespace tarepair::metrics
