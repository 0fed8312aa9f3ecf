#include "entrate/estimator.hpp"

#include "entrate/swlz.hpp"

namespace entrate {

std::string describe(const EstimatorSpec& spec) {
  std::string out(to_string(spec.method));
  if (is_direct(spec.method)) out += "(m=" + std::to_string(spec.order) + ")";
  return out;
}

EntropyEstimate run_estimator(const Sequence& seq, const EstimatorSpec& spec, const DirectOptions& options) {
  switch (spec.method) {
    case Method::direct_empirical:
      return estimate_direct(seq, spec.order, StationaryMethod::empirical, options);
    case Method::direct_eigen:
      return estimate_direct(seq, spec.order, StationaryMethod::eigen, options);
    case Method::direct_limit:
      return estimate_direct(seq, spec.order, StationaryMethod::limit, options);
    case Method::swlz:
      return swlz_entropy(seq);
  }
  return swlz_entropy(seq);
}

}  // namespace entrate
