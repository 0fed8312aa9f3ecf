#pragma once

// Versioned report schemas and their JSON / CSV encodings.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "entrate/sim.hpp"

namespace entrate::cli {

inline constexpr int kReportSchemaVersion = 1;

std::string tool_version();

struct EstimateRecord {
  std::string method;
  std::optional<std::size_t> order;
  double value_bits = 0.0;
  std::optional<double> se;
  std::optional<double> p_used;
  std::optional<std::size_t> bootstrap_replicates;
  std::size_t zeroed = 0;
  std::size_t dropped = 0;
  bool irreducible = false;
  std::size_t n_obs = 0;
  std::vector<std::string> warnings;
  std::vector<double> replicate_estimates;  // filled by the bootstrap command only

  bool operator==(const EstimateRecord&) const = default;
};

struct EstimateReport {
  int schema_version = kReportSchemaVersion;
  std::string tool_version;
  std::uint64_t seed = 0;
  std::vector<std::string> sources;
  std::vector<std::string> alphabet;
  std::size_t n_obs = 0;
  std::vector<EstimateRecord> estimates;

  bool operator==(const EstimateReport&) const = default;
};

void to_json(nlohmann::json& j, const EstimateRecord& r);
void from_json(const nlohmann::json& j, EstimateRecord& r);
void to_json(nlohmann::json& j, const EstimateReport& r);
void from_json(const nlohmann::json& j, EstimateReport& r);

// Flat CSV: one row per estimate, warnings joined with ';'.
std::string to_csv(const EstimateReport& report);

nlohmann::json experiment_to_json(const ExperimentReport& report);
ExperimentReport experiment_from_json(const nlohmann::json& j);
std::string experiment_to_csv(const ExperimentReport& report);

// Parses and validates a plan; errors name the offending field, or the
// line and column for malformed JSON.
ExperimentPlan parse_plan(const std::string& text);

}  // namespace entrate::cli
