#include "din/metrics.hpp"

#include <cmath>

#include "din/error.hpp"

namespace din {

Confusion confusion_counts(std::span<const int> predicted, std::span<const int> actual, int positive_class) {
  if (predicted.size() != actual.size()) throw ValidationError("metrics: prediction and label counts differ");
  Confusion c;
  for (std::size_t n = 0; n < actual.size(); ++n) {
    const bool p = predicted[n] == positive_class;
    const bool a = actual[n] == positive_class;
    if (p && a) ++c.tp;
    else if (!p && !a) ++c.tn;
    else if (p) ++c.fp;
    else ++c.fn;
  }
  return c;
}

namespace {
double ratio(double num, double den) { return den > 0.0 ? num / den : 0.0; }
}  // namespace

Metrics metrics_from(const Confusion& c) {
  const auto tp = static_cast<double>(c.tp);
  const auto tn = static_cast<double>(c.tn);
  const auto fp = static_cast<double>(c.fp);
  const auto fn = static_cast<double>(c.fn);
  return Metrics{ratio(tp + tn, tp + tn + fp + fn), ratio(tp, tp + fn), ratio(tn, tn + fp),
                 ratio(2.0 * tp, 2.0 * tp + fp + fn), c};
}

AggregateMetrics aggregate(std::span<const Metrics> runs) {
  auto summarize = [&](double Metrics::*field) {
    MetricSummary s;
    if (runs.empty()) return s;
    double sum = 0.0;
    for (const auto& r : runs) sum += r.*field;
    s.mean = sum / static_cast<double>(runs.size());
    if (runs.size() > 1) {
      double ss = 0.0;
      for (const auto& r : runs) ss += (r.*field - s.mean) * (r.*field - s.mean);
      s.std = std::sqrt(ss / static_cast<double>(runs.size() - 1));
    }
    return s;
  };
  return {summarize(&Metrics::accuracy), summarize(&Metrics::sensitivity), summarize(&Metrics::specificity),
          summarize(&Metrics::f1)};
}

}  // namespace din
