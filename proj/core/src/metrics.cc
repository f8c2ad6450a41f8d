#include "famrel/metrics.h"

namespace famrel {

double FMeasure(double precision, double recall) {
  const double sum = precision + recall;
  return sum > 0 ? 2.0 * precision * recall / sum : 0.0;
}

PrecisionRecall FromCounts(std::size_t tp, std::size_t fp, std::size_t fn) {
  PrecisionRecall m;
  m.true_positives = tp;
  m.false_positives = fp;
  m.false_negatives = fn;
  m.precision = tp + fp == 0 ? 0.0 : static_cast<double>(tp) / (tp + fp);
  m.recall = tp + fn == 0 ? 0.0 : static_cast<double>(tp) / (tp + fn);
  m.f = FMeasure(m.precision, m.recall);
  return m;
}

}  // namespace famrel
