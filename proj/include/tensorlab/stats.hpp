#pragma once

#include <cstddef>
#include <span>

namespace tensorlab {

struct Stats {
  std::size_t count = 0;
  double mean = 0.0;
  double median = 0.0;
  double standard_error = 0.0;  // sample standard deviation / sqrt(count)
  double min = 0.0;
  double max = 0.0;
};

Stats summarize(std::span<const double> values);

// Standard error of a product of two independent sample means (delta method).
double product_standard_error(const Stats& a, const Stats& b);

// Standard error of (mean |x|^p)^{1/p} given the stats of |x|^p.
double lp_norm_standard_error(const Stats& powered, double p);

}  // namespace tensorlab
