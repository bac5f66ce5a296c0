#pragma once

// Aggregation of per-record metric values into (metric, model, k) rows,
// tidy CSV output and static SVG line charts (metric against log k, one
// series per model, dashed human baseline).

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace storyeval {

struct MetricValue {
  std::string metric;
  std::string model;
  std::optional<std::uint64_t> k;  // absent for human text
  std::optional<double> value;     // absent values are excluded and counted
};

struct ReportRow {
  std::string metric;
  std::string model;
  std::optional<std::uint64_t> k;
  double mean = 0.0;
  double std_err = 0.0;  // sample standard deviation / sqrt(n)
  std::size_t n = 0;
  std::string fingerprint;

  friend bool operator==(const ReportRow&, const ReportRow&) = default;
};

struct MetricReport {
  std::vector<ReportRow> rows;  // sorted by metric, model, k (human first)
  std::map<std::string, std::size_t> excluded;  // group label -> absent values
  std::vector<std::string> warnings;
};

MetricReport aggregate(std::span<const MetricValue> values, const std::string& fingerprint);

inline constexpr const char* kCsvHeader = "metric,model,k,mean,stderr,n,fingerprint";

std::string to_csv(const MetricReport& report);
/// Rows only; throws std::runtime_error on a malformed file.
MetricReport parse_csv(const std::string& text);
void emit_csv(const MetricReport& report, const std::string& path);
MetricReport load_csv(const std::string& path);

/// Throws std::invalid_argument when no row carries `metric`.
std::string render_svg(const MetricReport& report, const std::string& metric);
void emit_svg(const MetricReport& report, const std::string& metric, const std::string& path);

/// Stable hash over sorted key=value pairs.
std::string config_fingerprint(const std::map<std::string, std::string>& config);

std::string format_double(double v);

}  // namespace storyeval
