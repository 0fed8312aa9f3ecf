#pragma once

#include <cstddef>
#include <string>

#include "entrate/direct.hpp"
#include "entrate/estimate.hpp"
#include "entrate/markov.hpp"

namespace entrate {

// Which estimator to run; `order` is ignored for swlz.
struct EstimatorSpec {
  Method method = Method::direct_empirical;
  std::size_t order = 1;

  bool operator==(const EstimatorSpec&) const = default;
};

// "direct_empirical(m=1)", "swlz", ...
std::string describe(const EstimatorSpec& spec);

EntropyEstimate run_estimator(const Sequence& seq, const EstimatorSpec& spec,
                              const DirectOptions& options = {});

}  // namespace entrate
