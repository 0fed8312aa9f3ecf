#pragma once

// Ground-truth chains: simulation, benchmark matrices, the two-state
// second-order family and the Monte Carlo experiment runner.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "entrate/estimator.hpp"
#include "entrate/markov.hpp"
#include "entrate/rng.hpp"

namespace entrate {

// Initial state: stationary (default), a fixed state, or a distribution.
struct StationaryStart {};
using ChainStart = std::variant<StationaryStart, State, ProbabilityVector>;

// Inverse-CDF sampling row by row. The stationary start requires an
// irreducible P.
Sequence simulate_chain(const TransitionMatrix& P, std::size_t n, const ChainStart& start, Rng& rng);

enum class BenchmarkKind { low, high, medium };

std::string_view to_string(BenchmarkKind kind);
BenchmarkKind parse_benchmark(std::string_view name);  // "low", "high", "medium"/"medium-builtin"

// low:    P_ii = diag, off-diagonal (1 - diag) / (kappa - 1)
// high:   every entry 1 / kappa
// medium: fixed 8 x 8 matrix with row entropies from about 0.84 to 2.52 bits
//         and entropy rate about 1.56 bits (kappa must be 8)
TransitionMatrix benchmark_matrix(BenchmarkKind kind, std::size_t kappa = 8, double diag = 0.95);

// Entropy rate of an irreducible chain under its stationary distribution.
double analytic_entropy_rate(const TransitionMatrix& P);

// Two-state second-order chain on composite states ordered (AA, AB, BA, BB),
// older symbol first:
//   AA -> (1-a, a, 0, 0)    AB -> (0, 0, b, 1-b)
//   BA -> (1-c, c, 0, 0)    BB -> (0, 0, d, 1-d)
struct SecondOrderParams {
  double a = 0.5, b = 0.5, c = 0.5, d = 0.5;
  void validate() const;
};

// First-order transition probabilities p = P(A->B), q = P(B->A) plus the
// dependence parameters phi, gamma; phi = gamma = 0 is a first-order chain.
struct ReparamPoint {
  double p = 0.5, q = 0.5, phi = 0.0, gamma = 0.0;
};

inline const SecondOrderParams kCaseI{0.1, 1.0 - 0.25 * (4.0 / 15.0), 0.85, 0.2};
inline const SecondOrderParams kCaseII{0.52, 1.0 - 0.25 * (0.95 / 0.75), 0.22, 0.95};

double phi_upper_bound(double p);
bool within_bounds(const ReparamPoint& point);

TransitionMatrix second_order_matrix(const SecondOrderParams& params);

// a = p(1+phi), c = 1-(1-p)(1+phi), d = q(1+gamma), b = 1-(1-q)(1+gamma)
SecondOrderParams reparam_to_abcd(const ReparamPoint& point);

// Inverse of reparam_to_abcd: p, q from the first-order projection, then
// phi = a/p - 1 and gamma = d/q - 1.
ReparamPoint abcd_to_reparam(const SecondOrderParams& params);

// The 4 x 4 matrix written directly in (p, q, phi, gamma); phi or gamma
// equal to -1 is outside its domain.
TransitionMatrix reparam_matrix(const ReparamPoint& point);

// psi^{-1} (d(1-c), da, da, a(1-b)); throws when psi == 0.
ProbabilityVector second_order_stationary(const SecondOrderParams& params);

// Exact per-symbol entropy rate of the second-order chain.
double second_order_entropy_rate(const SecondOrderParams& params);

// First-order behaviour seen when a second-order chain is watched one
// symbol at a time: [[1-p, p], [q, 1-q]].
TransitionMatrix first_order_projection(const SecondOrderParams& params);

struct EntropySurface {
  double p = 0.0, q = 0.0;
  std::vector<double> phi;
  std::vector<double> gamma;
  // values[i * gamma.size() + j] for (phi[i], gamma[j]); empty when the
  // point is out of bounds or the chain is reducible there.
  std::vector<std::optional<double>> values;

  const std::optional<double>& at(std::size_t i, std::size_t j) const { return values.at(i * gamma.size() + j); }
};

EntropySurface entropy_surface(double p, double q, const std::vector<double>& phi_grid,
                               const std::vector<double>& gamma_grid);

// n points from lo to hi inclusive; values within 1e-12 of 0 snap to 0.
std::vector<double> linear_grid(double lo, double hi, std::size_t n);

// Base-symbol sequence (A = 0, B = 1) started from the stationary pair
// distribution.
Sequence simulate_second_order(const SecondOrderParams& params, std::size_t n, Rng& rng);

struct BenchmarkGenerator {
  BenchmarkKind kind = BenchmarkKind::low;
  std::size_t kappa = 8;
  double diag = 0.95;
};

using Generator = std::variant<BenchmarkGenerator, TransitionMatrix, SecondOrderParams>;

struct ExperimentPlan {
  std::string name;
  Generator generator = BenchmarkGenerator{};
  std::vector<std::size_t> lengths;
  std::size_t replicates = 100;
  std::vector<EstimatorSpec> estimators;
  std::uint64_t seed = 0;
  // Reducible eigen/limit estimates count as 0 (with a tally) instead of
  // failing the cell.
  bool paper_zero_mode = true;
  // Stationary-bootstrap replicates per series and cell; 0 disables.
  std::size_t bootstrap_replicates = 0;
  // Worker threads; 0 picks the hardware concurrency. Results do not
  // depend on this.
  std::size_t threads = 0;

  void validate() const;
};

struct SpreadSummary {
  std::size_t count = 0;
  double min = 0.0, mean = 0.0, median = 0.0, max = 0.0;
  double sd = 0.0;  // sample SD; 0 when count < 2

  bool operator==(const SpreadSummary&) const = default;
};

struct ExperimentCell {
  std::size_t length = 0;
  EstimatorSpec estimator;
  std::vector<std::optional<double>> values;  // by replicate; empty on failure
  std::size_t failed = 0;
  std::size_t zeroed = 0;
  SpreadSummary estimates;
  std::optional<SpreadSummary> bootstrap_se;  // over series with a bootstrap SE
  std::size_t bootstrap_failed = 0;

  bool operator==(const ExperimentCell&) const = default;
};

struct ExperimentReport {
  std::string plan_name;
  std::uint64_t seed = 0;
  std::size_t replicates = 0;
  std::optional<double> true_rate;
  std::vector<ExperimentCell> cells;  // length-major, then estimator order

  bool operator==(const ExperimentReport&) const = default;
};

SpreadSummary summarize(const std::vector<double>& values);

ExperimentReport run_experiment(const ExperimentPlan& plan);

}  // namespace entrate
