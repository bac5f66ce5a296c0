#pragma once

// Record-level evaluation: every intrinsic and relatedness metric for each
// record, with SIF principal-component batches formed per the configured
// scope. Output order follows record id regardless of worker scheduling.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "storyeval/intrinsic.hpp"
#include "storyeval/relatedness.hpp"
#include "storyeval/report.hpp"
#include "storyeval/resources.hpp"
#include "storyeval/schema.hpp"

namespace storyeval {

struct EvalConfig {
  SifConfig sif;
  ConcretenessOptions concreteness;
  std::size_t workers = 1;
};

struct RecordMetrics {
  std::string id;
  std::string model;
  std::optional<std::uint64_t> k;
  std::vector<std::pair<std::string, std::optional<double>>> values;  // metric_names() order

  std::optional<double> get(std::string_view metric) const;
};

/// Every metric the engine reports per record, in output order.
const std::vector<std::string>& metric_names();

std::vector<RecordMetrics> evaluate_records(std::span<const EvalRecord> records,
                                            const Resources& res, const EvalConfig& cfg);

std::vector<MetricValue> to_metric_values(std::span<const RecordMetrics> metrics);

/// One JSON object per line: id, model, k, fingerprint, metrics{name: value}.
/// Absent values are omitted.
std::string emit_metrics_line(const RecordMetrics& m, const std::string& fingerprint);
RecordMetrics parse_metrics_line(std::string_view line);

void write_metrics(const std::string& path, std::span<const RecordMetrics> metrics,
                   const std::string& fingerprint);
std::vector<RecordMetrics> load_metrics(const std::string& path);

}  // namespace storyeval
