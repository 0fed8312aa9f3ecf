#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace entrate::cli {

struct GroupComparison {
  std::vector<double> group_a;
  std::vector<double> group_b;
  std::pair<double, double> means;
  double pooled_sd = 0.0;
  double t_statistic = 0.0;  // (mean_a - mean_b) / (s_p sqrt(1/n_a + 1/n_b))
  std::size_t df = 0;        // n_a + n_b - 2
};

// Two-sample t statistic with pooled (equal) variance. No p-value.
GroupComparison ttest_pooled(std::span<const double> a, std::span<const double> b);

double pearson_correlation(std::span<const double> x, std::span<const double> y);

}  // namespace entrate::cli
