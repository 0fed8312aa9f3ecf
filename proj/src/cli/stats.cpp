#include "entrate/cli/stats.hpp"

#include <cmath>
#include <numeric>

#include "entrate/errors.hpp"

namespace entrate::cli {

namespace {

double mean_of(std::span<const double> v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double centered_ss(std::span<const double> v, double mean) {
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return ss;
}

}  // namespace

GroupComparison ttest_pooled(std::span<const double> a, std::span<const double> b) {
  if (a.size() < 2 || b.size() < 2) throw InputError("each group needs at least 2 values");
  GroupComparison out;
  out.group_a.assign(a.begin(), a.end());
  out.group_b.assign(b.begin(), b.end());
  out.means = {mean_of(a), mean_of(b)};
  out.df = a.size() + b.size() - 2;
  const double pooled_var =
      (centered_ss(a, out.means.first) + centered_ss(b, out.means.second)) / static_cast<double>(out.df);
  if (!(pooled_var > 0.0)) throw NumericError("pooled variance is zero; t statistic undefined");
  out.pooled_sd = std::sqrt(pooled_var);
  const double scale = out.pooled_sd * std::sqrt(1.0 / static_cast<double>(a.size()) +
                                                 1.0 / static_cast<double>(b.size()));
  out.t_statistic = (out.means.first - out.means.second) / scale;
  return out;
}

double pearson_correlation(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw InputError("correlation needs two equal-length samples");
  const double mx = mean_of(x), my = mean_of(y);
  double sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) sxy += (x[i] - mx) * (y[i] - my);
  const double denom = std::sqrt(centered_ss(x, mx) * centered_ss(y, my));
  if (!(denom > 0.0)) throw NumericError("correlation undefined for constant samples");
  return sxy / denom;
}

}  // namespace entrate::cli
