#ifndef SCENREP_STATS_HPP
#define SCENREP_STATS_HPP

#include <algorithm>
#include <cmath>
#include <vector>

#include "scenrep/error.hpp"

namespace scenrep {

inline double median(std::vector<double> values) {
  if (values.empty()) throw Error(ErrorCode::InvalidArgument, "median of empty sequence");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  if (n % 2 == 1) return values[n / 2];
  return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

inline double mean(const std::vector<double>& values) {
  if (values.empty()) throw Error(ErrorCode::InvalidArgument, "mean of empty sequence");
  double s = 0.0;
  for (double v : values) s += v;
  return s / static_cast<double>(values.size());
}

// Population (1/N) standard deviation.
inline double population_std(const std::vector<double>& values) {
  const double m = mean(values);
  double s = 0.0;
  for (double v : values) s += (v - m) * (v - m);
  return std::sqrt(s / static_cast<double>(values.size()));
}

// Pearson correlation; CorrelationDegenerate when either series is constant.
inline double pearson_correlation(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size() || a.size() < 2)
    throw Error(ErrorCode::InvalidArgument, "correlation needs two equal-length series of size >= 2");
  const double ma = mean(a), mb = mean(b);
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  if (saa <= 0.0 || sbb <= 0.0)
    throw Error(ErrorCode::CorrelationDegenerate, "constant series has no defined correlation");
  return sab / std::sqrt(saa * sbb);
}

}  // namespace scenrep

#endif  // SCENREP_STATS_HPP
