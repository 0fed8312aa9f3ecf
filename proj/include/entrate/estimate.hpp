#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace entrate {

enum class Method { direct_empirical, direct_eigen, direct_limit, swlz };

std::string_view to_string(Method method);

// Accepts the tags above as well as the short CLI names
// "empirical", "eigen", "limit" and "swlz".
Method parse_method(std::string_view name);

bool is_direct(Method method);

// Point estimate of an entropy rate in bits per symbol.
struct EntropyEstimate {
  double value = 0.0;
  Method method = Method::direct_empirical;
  std::optional<std::size_t> order;  // absent for swlz
  std::size_t n_obs = 0;
  bool irreducible = false;
  std::vector<std::string> warnings;
};

}  // namespace entrate
