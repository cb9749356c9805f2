#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace din {

/// Binary confusion counts for one positive class against all others.
struct Confusion {
  std::size_t tp = 0;
  std::size_t tn = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
};

/// Ratios with an empty denominator are reported as 0.
struct Metrics {
  double accuracy = 0.0;
  double sensitivity = 0.0;
  double specificity = 0.0;
  double f1 = 0.0;
  Confusion confusion;
};

Confusion confusion_counts(std::span<const int> predicted, std::span<const int> actual, int positive_class);
Metrics metrics_from(const Confusion& c);
inline Metrics compute_metrics(std::span<const int> predicted, std::span<const int> actual, int positive_class) {
  return metrics_from(confusion_counts(predicted, actual, positive_class));
}

struct MetricSummary {
  double mean = 0.0;
  double std = 0.0;  ///< sample standard deviation, 0 for a single run
};

struct AggregateMetrics {
  MetricSummary accuracy;
  MetricSummary sensitivity;
  MetricSummary specificity;
  MetricSummary f1;
};

AggregateMetrics aggregate(std::span<const Metrics> runs);

}  // namespace din
