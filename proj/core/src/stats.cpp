#include "mdshrink/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mdshrink {

namespace {

double sorted_quantile(const std::vector<double>& sorted, double q) {
  const std::size_t m = sorted.size();
  if (m == 1) return sorted[0];
  const double h = q * static_cast<double>(m - 1);
  const std::size_t lo = static_cast<std::size_t>(h);
  if (lo + 1 >= m) return sorted[m - 1];
  const double frac = h - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

}  // namespace

double quantile(std::vector<double> xs, double q) {
  if (xs.empty()) throw std::invalid_argument("quantile: empty sample");
  if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("quantile: q must be in [0, 1]");
  std::sort(xs.begin(), xs.end());
  return sorted_quantile(xs, q);
}

Summary summarize(const std::vector<double>& xs) {
  if (xs.empty()) throw std::invalid_argument("summarize: empty sample");
  const std::size_t m = xs.size();

  double sum = 0.0;
  for (double x : xs) sum += x;
  const double mean = sum / static_cast<double>(m);

  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  const double stddev = m > 1 ? std::sqrt(ss / static_cast<double>(m - 1)) : 0.0;

  std::vector<double> sorted(xs);
  std::sort(sorted.begin(), sorted.end());

  Summary out;
  out.mean = mean;
  out.stddev = stddev;
  out.median = sorted_quantile(sorted, 0.5);
  out.q25 = sorted_quantile(sorted, 0.25);
  out.q75 = sorted_quantile(sorted, 0.75);
  out.iqr = out.q75 - out.q25;
  return out;
}

}  // namespace mdshrink
