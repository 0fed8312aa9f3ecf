#include "entrate/cli/report.hpp"

#include <set>
#include <sstream>

#include "entrate/errors.hpp"

#ifndef ENTRATE_VERSION
#define ENTRATE_VERSION "0.0.0"
#endif

namespace entrate::cli {

using nlohmann::json;

std::string tool_version() { return ENTRATE_VERSION; }

namespace {

template <typename T>
void put_optional(json& j, const char* key, const std::optional<T>& v) {
  j[key] = v ? json(*v) : json(nullptr);
}

template <typename T>
std::optional<T> get_optional(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<T>();
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

template <typename T>
std::string csv_optional(const std::optional<T>& v) {
  if (!v) return "";
  std::ostringstream os;
  os.precision(17);
  os << *v;
  return os.str();
}

std::string csv_number(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

json spread_to_json(const SpreadSummary& s) {
  return json{{"count", s.count}, {"min", s.min},   {"mean", s.mean},
              {"median", s.median}, {"max", s.max}, {"sd", s.sd}};
}

SpreadSummary spread_from_json(const json& j) {
  SpreadSummary s;
  s.count = j.at("count").get<std::size_t>();
  s.min = j.at("min").get<double>();
  s.mean = j.at("mean").get<double>();
  s.median = j.at("median").get<double>();
  s.max = j.at("max").get<double>();
  s.sd = j.at("sd").get<double>();
  return s;
}

}  // namespace

void to_json(json& j, const EstimateRecord& r) {
  j = json::object();
  j["method"] = r.method;
  put_optional(j, "order", r.order);
  j["value_bits"] = r.value_bits;
  put_optional(j, "se", r.se);
  put_optional(j, "p_used", r.p_used);
  put_optional(j, "bootstrap_replicates", r.bootstrap_replicates);
  j["zeroed_replicates"] = r.zeroed;
  j["dropped_replicates"] = r.dropped;
  j["irreducible"] = r.irreducible;
  j["n_obs"] = r.n_obs;
  j["warnings"] = r.warnings;
  if (!r.replicate_estimates.empty()) j["replicate_estimates"] = r.replicate_estimates;
}

void from_json(const json& j, EstimateRecord& r) {
  r.method = j.at("method").get<std::string>();
  r.order = get_optional<std::size_t>(j, "order");
  r.value_bits = j.at("value_bits").get<double>();
  r.se = get_optional<double>(j, "se");
  r.p_used = get_optional<double>(j, "p_used");
  r.bootstrap_replicates = get_optional<std::size_t>(j, "bootstrap_replicates");
  r.zeroed = j.value("zeroed_replicates", std::size_t{0});
  r.dropped = j.value("dropped_replicates", std::size_t{0});
  r.irreducible = j.at("irreducible").get<bool>();
  r.n_obs = j.at("n_obs").get<std::size_t>();
  r.warnings = j.at("warnings").get<std::vector<std::string>>();
  r.replicate_estimates = j.value("replicate_estimates", std::vector<double>{});
}

void to_json(json& j, const EstimateReport& r) {
  j = json{{"schema_version", r.schema_version},
           {"tool_version", r.tool_version},
           {"seed", r.seed},
           {"sources", r.sources},
           {"alphabet", r.alphabet},
           {"n_obs", r.n_obs},
           {"estimates", r.estimates}};
}

void from_json(const json& j, EstimateReport& r) {
  r.schema_version = j.at("schema_version").get<int>();
  if (r.schema_version != kReportSchemaVersion) {
    throw InputError("unsupported report schema_version " + std::to_string(r.schema_version));
  }
  r.tool_version = j.at("tool_version").get<std::string>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.sources = j.at("sources").get<std::vector<std::string>>();
  r.alphabet = j.at("alphabet").get<std::vector<std::string>>();
  r.n_obs = j.at("n_obs").get<std::size_t>();
  r.estimates = j.at("estimates").get<std::vector<EstimateRecord>>();
}

std::string to_csv(const EstimateReport& report) {
  std::ostringstream os;
  os << "schema_version,tool_version,seed,method,order,value_bits,se,p_used,bootstrap_replicates,"
        "irreducible,n_obs,warnings\n";
  for (const auto& r : report.estimates) {
    std::string warnings;
    for (const auto& w : r.warnings) warnings += (warnings.empty() ? "" : ";") + w;
    os << report.schema_version << ',' << csv_field(report.tool_version) << ',' << report.seed << ','
       << r.method << ',' << csv_optional(r.order) << ',' << csv_number(r.value_bits) << ','
       << csv_optional(r.se) << ',' << csv_optional(r.p_used) << ',' << csv_optional(r.bootstrap_replicates)
       << ',' << (r.irreducible ? "true" : "false") << ',' << r.n_obs << ',' << csv_field(warnings) << '\n';
  }
  return os.str();
}

json experiment_to_json(const ExperimentReport& report) {
  json cells = json::array();
  for (const auto& c : report.cells) {
    json values = json::array();
    for (const auto& v : c.values) values.push_back(v ? json(*v) : json(nullptr));
    json cell{{"length", c.length},
              {"method", std::string(to_string(c.estimator.method))},
              {"order", is_direct(c.estimator.method) ? json(c.estimator.order) : json(nullptr)},
              {"failed", c.failed},
              {"zeroed", c.zeroed},
              {"estimates", spread_to_json(c.estimates)},
              {"values", values}};
    cell["bootstrap_se"] = c.bootstrap_se ? spread_to_json(*c.bootstrap_se) : json(nullptr);
    cell["bootstrap_failed"] = c.bootstrap_failed;
    cells.push_back(std::move(cell));
  }
  return json{{"schema_version", kReportSchemaVersion},
              {"tool_version", tool_version()},
              {"plan", report.plan_name},
              {"seed", report.seed},
              {"replicates", report.replicates},
              {"true_rate", report.true_rate ? json(*report.true_rate) : json(nullptr)},
              {"cells", cells}};
}

ExperimentReport experiment_from_json(const json& j) {
  ExperimentReport report;
  report.plan_name = j.at("plan").get<std::string>();
  report.seed = j.at("seed").get<std::uint64_t>();
  report.replicates = j.at("replicates").get<std::size_t>();
  report.true_rate = get_optional<double>(j, "true_rate");
  for (const auto& jc : j.at("cells")) {
    ExperimentCell c;
    c.length = jc.at("length").get<std::size_t>();
    c.estimator.method = parse_method(jc.at("method").get<std::string>());
    c.estimator.order = get_optional<std::size_t>(jc, "order").value_or(1);
    c.failed = jc.at("failed").get<std::size_t>();
    c.zeroed = jc.at("zeroed").get<std::size_t>();
    c.estimates = spread_from_json(jc.at("estimates"));
    for (const auto& v : jc.at("values")) {
      c.values.push_back(v.is_null() ? std::nullopt : std::optional<double>(v.get<double>()));
    }
    if (!jc.at("bootstrap_se").is_null()) c.bootstrap_se = spread_from_json(jc.at("bootstrap_se"));
    c.bootstrap_failed = jc.at("bootstrap_failed").get<std::size_t>();
    report.cells.push_back(std::move(c));
  }
  return report;
}

std::string experiment_to_csv(const ExperimentReport& report) {
  std::ostringstream os;
  os << "plan,seed,length,method,order,count,failed,zeroed,min,mean,median,max,sd,true_rate,"
        "bootstrap_se_median,bootstrap_se_mean\n";
  for (const auto& c : report.cells) {
    const auto order = is_direct(c.estimator.method) ? std::optional<std::size_t>(c.estimator.order) : std::nullopt;
    os << csv_field(report.plan_name) << ',' << report.seed << ',' << c.length << ','
       << to_string(c.estimator.method) << ',' << csv_optional(order) << ',' << c.estimates.count << ','
       << c.failed << ',' << c.zeroed << ',' << csv_number(c.estimates.min) << ','
       << csv_number(c.estimates.mean) << ',' << csv_number(c.estimates.median) << ','
       << csv_number(c.estimates.max) << ',' << csv_number(c.estimates.sd) << ','
       << csv_optional(report.true_rate) << ','
       << (c.bootstrap_se ? csv_number(c.bootstrap_se->median) : "") << ','
       << (c.bootstrap_se ? csv_number(c.bootstrap_se->mean) : "") << '\n';
  }
  return os.str();
}

namespace {

[[noreturn]] void plan_error(const std::string& field, const std::string& message) {
  throw InputError("plan field '" + field + "': " + message);
}

void check_keys(const json& j, const std::string& where, const std::set<std::string>& allowed) {
  if (!j.is_object()) plan_error(where, "expected an object");
  for (const auto& [key, _] : j.items()) {
    if (!allowed.contains(key)) plan_error(where.empty() ? key : where + "." + key, "unknown field");
  }
}

template <typename T>
T field(const json& j, const std::string& where, const char* key) {
  const std::string path = where.empty() ? key : where + "." + key;
  if (!j.contains(key)) plan_error(path, "missing");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    plan_error(path, "has the wrong type");
  }
}

template <typename T>
T field_or(const json& j, const std::string& where, const char* key, T fallback) {
  return j.contains(key) ? field<T>(j, where, key) : fallback;
}

Generator parse_generator(const json& g) {
  check_keys(g, "generator", {"benchmark", "kappa", "diag", "matrix", "second_order"});
  const int kinds = static_cast<int>(g.contains("benchmark")) + static_cast<int>(g.contains("matrix")) +
                    static_cast<int>(g.contains("second_order"));
  if (kinds != 1) plan_error("generator", "exactly one of 'benchmark', 'matrix', 'second_order' is required");

  if (g.contains("benchmark")) {
    BenchmarkGenerator bench;
    try {
      bench.kind = parse_benchmark(field<std::string>(g, "generator", "benchmark"));
    } catch (const InputError& e) {
      plan_error("generator.benchmark", e.what());
    }
    bench.kappa = field_or<std::size_t>(g, "generator", "kappa", 8);
    bench.diag = field_or<double>(g, "generator", "diag", 0.95);
    return bench;
  }
  if (g.contains("matrix")) {
    const auto rows = field<std::vector<std::vector<double>>>(g, "generator", "matrix");
    try {
      return TransitionMatrix::from_rows(rows);
    } catch (const InputError& e) {
      plan_error("generator.matrix", e.what());
    }
  }
  const json& so = g.at("second_order");
  if (so.is_string()) {
    const auto name = so.get<std::string>();
    if (name == "case-i") return kCaseI;
    if (name == "case-ii") return kCaseII;
    plan_error("generator.second_order", "unknown named case '" + name + "'");
  }
  if (so.contains("phi") || so.contains("gamma")) {
    check_keys(so, "generator.second_order", {"p", "q", "phi", "gamma"});
    const ReparamPoint point{field<double>(so, "generator.second_order", "p"),
                             field<double>(so, "generator.second_order", "q"),
                             field<double>(so, "generator.second_order", "phi"),
                             field<double>(so, "generator.second_order", "gamma")};
    try {
      return reparam_to_abcd(point);
    } catch (const InputError& e) {
      plan_error("generator.second_order", e.what());
    }
  }
  check_keys(so, "generator.second_order", {"a", "b", "c", "d"});
  return SecondOrderParams{field<double>(so, "generator.second_order", "a"),
                           field<double>(so, "generator.second_order", "b"),
                           field<double>(so, "generator.second_order", "c"),
                           field<double>(so, "generator.second_order", "d")};
}

}  // namespace

ExperimentPlan parse_plan(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1, column = 1;
    for (std::size_t k = 0; k + 1 < e.byte && k < text.size(); ++k) {
      if (text[k] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    throw InputError("plan is not valid JSON at line " + std::to_string(line) + ", column " +
                     std::to_string(column) + ": " + e.what());
  }
  check_keys(j, "", {"name", "generator", "lengths", "replicates", "estimators", "seed", "paper_zero_mode",
                     "bootstrap_replicates", "threads"});

  ExperimentPlan plan;
  plan.name = field_or<std::string>(j, "", "name", "experiment");
  if (!j.contains("generator")) plan_error("generator", "missing");
  plan.generator = parse_generator(j.at("generator"));
  plan.lengths = field<std::vector<std::size_t>>(j, "", "lengths");
  plan.replicates = field<std::size_t>(j, "", "replicates");
  plan.seed = field_or<std::uint64_t>(j, "", "seed", 0);
  plan.paper_zero_mode = field_or<bool>(j, "", "paper_zero_mode", true);
  plan.bootstrap_replicates = field_or<std::size_t>(j, "", "bootstrap_replicates", 0);
  plan.threads = field_or<std::size_t>(j, "", "threads", 0);

  if (!j.contains("estimators") || !j.at("estimators").is_array()) plan_error("estimators", "expected an array");
  std::size_t k = 0;
  for (const auto& e : j.at("estimators")) {
    const std::string where = "estimators[" + std::to_string(k++) + "]";
    check_keys(e, where, {"method", "order"});
    EstimatorSpec spec;
    try {
      spec.method = parse_method(field<std::string>(e, where, "method"));
    } catch (const InputError& err) {
      plan_error(where + ".method", err.what());
    }
    spec.order = field_or<std::size_t>(e, where, "order", 1);
    plan.estimators.push_back(spec);
  }
  plan.validate();
  return plan;
}

}  // namespace entrate::cli
