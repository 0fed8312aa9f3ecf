#include "entrate/estimate.hpp"

#include "entrate/errors.hpp"

namespace entrate {

std::string_view to_string(Method method) {
  switch (method) {
    case Method::direct_empirical: return "direct_empirical";
    case Method::direct_eigen: return "direct_eigen";
    case Method::direct_limit: return "direct_limit";
    case Method::swlz: return "swlz";
  }
  return "unknown";
}

Method parse_method(std::string_view name) {
  if (name == "empirical" || name == "direct_empirical") return Method::direct_empirical;
  if (name == "eigen" || name == "direct_eigen") return Method::direct_eigen;
  if (name == "limit" || name == "direct_limit") return Method::direct_limit;
  if (name == "swlz") return Method::swlz;
  throw InputError("unknown estimation method '" + std::string(name) + "'");
}

bool is_direct(Method method) { return method != Method::swlz; }

}  // namespace entrate
