#pragma once

// Direct entropy-rate estimation: H = -sum_i pi_i sum_j P_ij log2 P_ij
// with P estimated by maximum likelihood and pi by one of three
// stationary-distribution estimators.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "entrate/estimate.hpp"
#include "entrate/markov.hpp"

namespace entrate {

inline constexpr std::size_t kDefaultCesaroTerms = 100000;
inline constexpr double kCesaroTolerance = 1e-6;

// -sum p log2 p with 0 log2 0 = 0.
double shannon_entropy(const ProbabilityVector& dist);
double shannon_entropy(std::span<const double> probs);

// Row-total frequencies n_{i+} / n_{++}.
ProbabilityVector stationary_empirical(const TransitionCounts& counts);

// Left unit eigenvector of P, normalized to sum 1. Throws
// ReducibleMatrixError unless P is irreducible, which is exactly when the
// unit eigenvalue is simple and the eigenvector strictly positive.
ProbabilityVector stationary_eigen(const TransitionMatrix& P);

struct CesaroAverage {
  ProbabilityVector distribution;
  // max-norm distance between the averages over N and N/2 terms
  double half_gap = 0.0;
  bool converged() const { return half_gap < kCesaroTolerance; }
};

// (1/N) sum_{i=1..N} P^i(first state, .), computed by repeated
// vector-matrix products on the first row only.
CesaroAverage stationary_limit(const TransitionMatrix& P, std::size_t terms = kDefaultCesaroTerms);

// max_j |(pi P)_j - pi_j|.
double stationary_residual(const TransitionMatrix& P, const ProbabilityVector& pi);

// Weighted average of row entropies. Rows with pi_i = 0 contribute 0 even
// when undefined (a warning is appended if `warnings` is given). A
// positive-weight undefined row is an error.
double entropy_rate(const TransitionMatrix& P, const ProbabilityVector& pi,
                    std::vector<std::string>* warnings = nullptr);

enum class StationaryMethod { empirical, eigen, limit };

Method method_tag(StationaryMethod method);

struct DirectOptions {
  // Reducible eigen/limit estimates become 0 with a warning instead of
  // throwing ReducibleMatrixError.
  bool paper_zero_mode = false;
  std::size_t cesaro_terms = kDefaultCesaroTerms;
};

// embed -> count -> MLE -> stationary estimate -> entropy rate. Only
// composite states that actually occur in the data enter the estimated
// chain; never-visited tuples have no row and no weight.
EntropyEstimate estimate_direct(const Sequence& seq, std::size_t order, StationaryMethod method,
                                const DirectOptions& options = {});

// As above over several observation windows; transitions are counted
// within windows only.
EntropyEstimate estimate_direct(std::span<const Sequence> segments, std::size_t order,
                                StationaryMethod method, const DirectOptions& options = {});

}  // namespace entrate
