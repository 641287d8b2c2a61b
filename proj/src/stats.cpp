#include "tensorlab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "tensorlab/errors.hpp"

namespace tensorlab {

Stats summarize(std::span<const double> values) {
  if (values.empty()) throw DomainError("cannot summarize an empty sample");
  Stats s;
  s.count = values.size();
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(s.count);
  double ss = 0.0;
  for (double v : values) ss += (v - s.mean) * (v - s.mean);
  if (s.count > 1) {
    s.standard_error = std::sqrt(ss / static_cast<double>(s.count - 1) / static_cast<double>(s.count));
  }
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t mid = s.count / 2;
  s.median = s.count % 2 ? sorted[mid] : 0.5 * (sorted[mid - 1] + sorted[mid]);
  s.min = sorted.front();
  s.max = sorted.back();
  return s;
}

double product_standard_error(const Stats& a, const Stats& b) {
  return std::hypot(a.mean * b.standard_error, b.mean * a.standard_error);
}

double lp_norm_standard_error(const Stats& powered, double p) {
  if (powered.mean <= 0.0) return 0.0;
  return powered.standard_error * std::pow(powered.mean, 1.0 / p - 1.0) / p;
}

}  // namespace tensorlab
