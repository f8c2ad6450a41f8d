#ifndef FAMREL_METRICS_H_
#define FAMREL_METRICS_H_

#include <cstddef>

namespace famrel {

struct PrecisionRecall {
  double precision = 0;
  double recall = 0;
  double f = 0;
  std::size_t true_positives = 0;
  std::size_t false_positives = 0;
  std::size_t false_negatives = 0;
};

// Harmonic mean 2PR/(P+R); 0 when both are 0.
double FMeasure(double precision, double recall);

// Empty prediction sets give precision 0; empty gold sets give recall 0.
PrecisionRecall FromCounts(std::size_t tp, std::size_t fp, std::size_t fn);

}  // namespace famrel

#endif  // FAMREL_METRICS_H_
