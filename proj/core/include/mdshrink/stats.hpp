#pragma once

#include <vector>

namespace mdshrink {

/// Summary statistics of a nonempty sample.  stddev uses the 1/(m-1)
/// normalization (0 for a singleton); median and the quartiles use
/// linear-interpolation quantiles, so the median follows the midpoint
/// convention for even sizes.
struct Summary {
  double mean = 0.0;
  double stddev = 0.0;
  double median = 0.0;
  double q25 = 0.0;
  double q75 = 0.0;
  double iqr = 0.0;
};

Summary summarize(const std::vector<double>& xs);

/// Linear-interpolation quantile of an unsorted sample, q in [0, 1].
double quantile(std::vector<double> xs, double q);

}  // namespace mdshrink
