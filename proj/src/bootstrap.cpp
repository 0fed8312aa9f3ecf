#include "entrate/bootstrap.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "entrate/errors.hpp"

namespace entrate {

void BootstrapConfig::validate() const {
  if (!(p > 0.0 && p <= 1.0)) throw InputError("bootstrap p must lie in (0, 1]");
  if (replicates < 2) throw InputError("bootstrap needs at least 2 replicates");
}

BlockParameter choose_p(double h_hat, std::size_t n) {
  if (!(h_hat >= 0.0)) throw InputError("entropy estimate must be nonnegative");
  if (n < 2) throw InputError("choose_p needs n >= 2");
  const double raw = h_hat / std::log2(static_cast<double>(n));
  BlockParameter out;
  out.p = std::clamp(raw, kMinBlockParameter, 1.0);
  if (out.p != raw) {
    out.warning = "bootstrap p = " + std::to_string(raw) + " clamped to " + std::to_string(out.p);
  }
  return out;
}

Sequence stationary_bootstrap_sample(const Sequence& seq, double p, Rng& rng) {
  if (!(p > 0.0 && p <= 1.0)) throw InputError("bootstrap p must lie in (0, 1]");
  const auto x = seq.states();
  const std::size_t n = x.size();
  std::uniform_int_distribution<std::size_t> start(0, n - 1);
  // geometric_distribution counts failures before the first success and
  // requires p < 1; p == 1 means every block has length 1.
  std::geometric_distribution<std::size_t> extra(p < 1.0 ? p : 0.5);

  std::vector<State> out;
  out.reserve(n);
  while (out.size() < n) {
    const std::size_t i = start(rng);
    const std::size_t len = p < 1.0 ? 1 + extra(rng) : 1;
    for (std::size_t k = 0; k < len && out.size() < n; ++k) out.push_back(x[(i + k) % n]);
  }
  return Sequence(std::move(out), seq.kappa());
}

double sample_sd(const std::vector<double>& values) {
  if (values.size() < 2) throw NumericError("standard deviation needs at least 2 values");
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

BootstrapResult bootstrap_se(const Sequence& seq, const EstimatorSpec& estimator,
                             const BootstrapConfig& config) {
  config.validate();
  if (seq.size() < 2) throw InputError("bootstrap needs a sequence of length >= 2");
  DirectOptions replicate_options;
  replicate_options.paper_zero_mode = config.on_failure == ReplicateFailurePolicy::zero;
  (void)run_estimator(seq, estimator, replicate_options);

  BootstrapResult result;
  result.p_used = config.p;
  result.estimator_tag = describe(estimator);
  result.estimates.reserve(config.replicates);
  for (std::size_t b = 0; b < config.replicates; ++b) {
    Rng rng = substream(config.seed, {b});
    const auto sample = stationary_bootstrap_sample(seq, config.p, rng);
    try {
      const auto est = run_estimator(sample, estimator, replicate_options);
      if (is_direct(estimator.method) && estimator.method != Method::direct_empirical && !est.irreducible) {
        ++result.zeroed;
      }
      result.estimates.push_back(est.value);
    } catch (const NumericError&) {
      ++result.dropped;
    }
  }
  if (result.estimates.size() < 2) {
    throw NumericError("fewer than 2 bootstrap replicates produced an estimate");
  }
  result.standard_error = sample_sd(result.estimates);
  return result;
}

}  // namespace entrate
