#pragma once

// Stationary bootstrap (geometric block lengths, wrap-around indexing) and
// bootstrap standard errors for any entropy-rate estimator.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "entrate/estimator.hpp"
#include "entrate/markov.hpp"
#include "entrate/rng.hpp"

namespace entrate {

inline constexpr double kMinBlockParameter = 1e-6;

enum class ReplicateFailurePolicy {
  zero,  // reducible replicates count as 0-valued estimates
  drop,  // failed replicates are left out and counted
};

struct BootstrapConfig {
  double p = 0.5;
  std::size_t replicates = 100;
  std::uint64_t seed = 0;
  ReplicateFailurePolicy on_failure = ReplicateFailurePolicy::zero;

  void validate() const;
};

struct BootstrapResult {
  std::vector<double> estimates;
  double standard_error = 0.0;
  double p_used = 0.0;
  std::string estimator_tag;
  std::size_t zeroed = 0;
  std::size_t dropped = 0;
};

struct BlockParameter {
  double p = 1.0;
  std::optional<std::string> warning;  // set when p had to be clamped
};

// p = h_hat / log2(n), clamped to [1e-6, 1].
BlockParameter choose_p(double h_hat, std::size_t n);

// One resample of exactly seq.size() symbols built from blocks
// x_I ... x_{I+L-1} (indices mod n) with I ~ U{0..n-1}, L ~ Geometric(p) on
// {1, 2, ...}.
Sequence stationary_bootstrap_sample(const Sequence& seq, double p, Rng& rng);

// Replicate b draws from substream(seed, {b}), so results do not depend on
// the order replicates are evaluated in. Errors from the estimator on the
// original sequence propagate.
BootstrapResult bootstrap_se(const Sequence& seq, const EstimatorSpec& estimator,
                             const BootstrapConfig& config);

// Sample standard deviation (divisor n - 1).
double sample_sd(const std::vector<double>& values);

}  // namespace entrate
