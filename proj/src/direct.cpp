#include "entrate/direct.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "entrate/errors.hpp"

namespace entrate {

namespace {

// Dense solves are used up to this size; larger chains fall back to
// iterating the lazy chain (P + I) / 2.
constexpr std::size_t kDenseSolveLimit = 2048;
constexpr double kResidualTarget = 1e-12;

std::vector<double> left_multiply(const TransitionMatrix& P, std::span<const double> v) {
  std::vector<double> out(P.size(), 0.0);
  for (std::size_t i = 0; i < P.size(); ++i) {
    const double vi = v[i];
    if (vi == 0.0) continue;
    for (const auto& e : P.row(static_cast<State>(i))) out[e.to] += vi * e.prob;
  }
  return out;
}

double residual_of(const TransitionMatrix& P, std::span<const double> pi) {
  const auto next = left_multiply(P, pi);
  double worst = 0.0;
  for (std::size_t j = 0; j < pi.size(); ++j) worst = std::max(worst, std::abs(next[j] - pi[j]));
  return worst;
}

// LU factorization with partial pivoting of a dense n x n system.
class DenseLu {
 public:
  explicit DenseLu(std::vector<double> a, std::size_t n) : a_(std::move(a)), n_(n), perm_(n) {
    std::iota(perm_.begin(), perm_.end(), std::size_t{0});
    for (std::size_t k = 0; k < n_; ++k) {
      std::size_t pivot = k;
      for (std::size_t r = k + 1; r < n_; ++r) {
        if (std::abs(at(r, k)) > std::abs(at(pivot, k))) pivot = r;
      }
      if (at(pivot, k) == 0.0) throw NumericError("singular stationary system");
      if (pivot != k) {
        for (std::size_t c = 0; c < n_; ++c) std::swap(at(k, c), at(pivot, c));
        std::swap(perm_[k], perm_[pivot]);
      }
      const double diag = at(k, k);
      for (std::size_t r = k + 1; r < n_; ++r) {
        const double f = at(r, k) / diag;
        at(r, k) = f;
        if (f == 0.0) continue;
        for (std::size_t c = k + 1; c < n_; ++c) at(r, c) -= f * at(k, c);
      }
    }
  }

  std::vector<double> solve(std::span<const double> rhs) const {
    std::vector<double> x(n_);
    for (std::size_t r = 0; r < n_; ++r) {
      double s = rhs[perm_[r]];
      for (std::size_t c = 0; c < r; ++c) s -= at(r, c) * x[c];
      x[r] = s;
    }
    for (std::size_t r = n_; r-- > 0;) {
      double s = x[r];
      for (std::size_t c = r + 1; c < n_; ++c) s -= at(r, c) * x[c];
      x[r] = s / at(r, r);
    }
    return x;
  }

 private:
  double& at(std::size_t r, std::size_t c) { return a_[r * n_ + c]; }
  double at(std::size_t r, std::size_t c) const { return a_[r * n_ + c]; }

  std::vector<double> a_;
  std::size_t n_;
  std::vector<std::size_t> perm_;
};

// Solves pi (P - I) = 0 with the last balance equation replaced by
// sum(pi) = 1, followed by a couple of refinement sweeps.
std::vector<double> solve_stationary_dense(const TransitionMatrix& P) {
  const std::size_t n = P.size();
  std::vector<double> a(n * n, 0.0);
  // Row j of the system is column j of (P - I), i.e. (P^T - I).
  for (std::size_t i = 0; i < n; ++i) {
    for (const auto& e : P.row(static_cast<State>(i))) a[e.to * n + i] += e.prob;
    a[i * n + i] -= 1.0;
  }
  for (std::size_t c = 0; c < n; ++c) a[(n - 1) * n + c] = 1.0;

  const auto apply = [&](std::span<const double> x) {
    auto y = left_multiply(P, x);
    for (std::size_t j = 0; j < n; ++j) y[j] -= x[j];
    y[n - 1] = std::accumulate(x.begin(), x.end(), 0.0);
    return y;
  };

  const DenseLu lu(std::move(a), n);
  std::vector<double> rhs(n, 0.0);
  rhs[n - 1] = 1.0;
  auto pi = lu.solve(rhs);
  for (int sweep = 0; sweep < 3; ++sweep) {
    const auto applied = apply(pi);
    std::vector<double> r(n);
    for (std::size_t j = 0; j < n; ++j) r[j] = rhs[j] - applied[j];
    const auto delta = lu.solve(r);
    for (std::size_t j = 0; j < n; ++j) pi[j] += delta[j];
  }
  return pi;
}

std::vector<double> solve_stationary_iterative(const TransitionMatrix& P) {
  const std::size_t n = P.size();
  std::vector<double> pi(n, 1.0 / static_cast<double>(n));
  constexpr std::size_t kMaxIterations = 2'000'000;
  for (std::size_t it = 0; it < kMaxIterations; ++it) {
    auto next = left_multiply(P, pi);
    double gap = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      gap = std::max(gap, std::abs(next[j] - pi[j]));
      pi[j] = 0.5 * (pi[j] + next[j]);
    }
    if (gap < kResidualTarget) return pi;
  }
  throw NumericError("stationary power iteration did not converge");
}

std::vector<double> clean_distribution(std::vector<double> v) {
  for (double& x : v) {
    if (x < 0.0) x = 0.0;
  }
  const double sum = std::accumulate(v.begin(), v.end(), 0.0);
  if (!(sum > 0.0)) throw NumericError("stationary solve produced a zero vector");
  for (double& x : v) x /= sum;
  return v;
}

double row_entropy(std::span<const TransitionEntry> row) {
  double h = 0.0;
  for (const auto& e : row) {
    if (e.prob > 0.0) h -= e.prob * std::log2(e.prob);
  }
  return h;
}

// Relabels the states that occur anywhere in the segments to 0..k-1 in
// ascending order of their original index.
std::vector<Sequence> compact_states(const std::vector<Sequence>& segments) {
  std::map<State, State> relabel;
  for (const auto& seg : segments) {
    for (State s : seg.states()) relabel.emplace(s, 0);
  }
  State next = 0;
  for (auto& [from, to] : relabel) to = next++;
  std::vector<Sequence> out;
  out.reserve(segments.size());
  for (const auto& seg : segments) {
    std::vector<State> x;
    x.reserve(seg.size());
    for (State s : seg.states()) x.push_back(relabel.at(s));
    out.emplace_back(std::move(x), relabel.size());
  }
  return out;
}

}  // namespace

double shannon_entropy(std::span<const double> probs) {
  double h = 0.0;
  for (double p : probs) {
    if (p > 0.0) h -= p * std::log2(p);
  }
  return std::max(h, 0.0);
}

double shannon_entropy(const ProbabilityVector& dist) { return shannon_entropy(dist.values()); }

ProbabilityVector stationary_empirical(const TransitionCounts& counts) {
  const auto total = counts.grand_total();
  if (total == 0) throw InputError("no transitions observed");
  std::vector<double> pi(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i) {
    pi[i] = static_cast<double>(counts.row_total(static_cast<State>(i))) / static_cast<double>(total);
  }
  return ProbabilityVector(std::move(pi));
}

ProbabilityVector stationary_eigen(const TransitionMatrix& P) {
  if (!P.all_rows_defined()) throw ReducibleMatrixError("matrix has undefined rows");
  if (!is_irreducible(P)) throw ReducibleMatrixError("unit eigenvalue is not simple");

  auto pi = clean_distribution(P.size() <= kDenseSolveLimit ? solve_stationary_dense(P)
                                                            : solve_stationary_iterative(P));
  if (residual_of(P, pi) >= 1e-10) {
    throw NumericError("stationary eigenvector residual above 1e-10");
  }
  return ProbabilityVector(std::move(pi));
}

CesaroAverage stationary_limit(const TransitionMatrix& P, std::size_t terms) {
  if (terms == 0) throw InputError("Cesaro average needs at least one term");
  if (!is_irreducible(P)) throw ReducibleMatrixError("Cesaro limit requires an irreducible chain");

  const std::size_t n = P.size();
  std::vector<double> row(n, 0.0);
  row[0] = 1.0;
  std::vector<double> sum(n, 0.0);
  std::vector<double> half_average;
  const std::size_t half = terms / 2;
  for (std::size_t i = 1; i <= terms; ++i) {
    row = left_multiply(P, row);
    for (std::size_t j = 0; j < n; ++j) sum[j] += row[j];
    if (i == half) {
      half_average = sum;
      for (double& v : half_average) v /= static_cast<double>(half);
    }
  }
  for (double& v : sum) v /= static_cast<double>(terms);

  double gap = 0.0;
  if (!half_average.empty()) {
    for (std::size_t j = 0; j < n; ++j) gap = std::max(gap, std::abs(sum[j] - half_average[j]));
  } else {
    gap = std::numeric_limits<double>::infinity();
  }
  return CesaroAverage{ProbabilityVector(clean_distribution(std::move(sum))), gap};
}

double stationary_residual(const TransitionMatrix& P, const ProbabilityVector& pi) {
  if (pi.size() != P.size()) throw InputError("dimension mismatch between P and pi");
  return residual_of(P, pi.values());
}

double entropy_rate(const TransitionMatrix& P, const ProbabilityVector& pi,
                    std::vector<std::string>* warnings) {
  if (pi.size() != P.size()) {
    throw InputError("dimension mismatch: P is " + std::to_string(P.size()) + " states, pi has " +
                     std::to_string(pi.size()));
  }
  double h = 0.0;
  std::size_t skipped_undefined = 0;
  for (std::size_t i = 0; i < P.size(); ++i) {
    const State s = static_cast<State>(i);
    if (!P.is_defined(s)) {
      if (pi[i] > 0.0) {
        throw NumericError("state " + std::to_string(i) + " has positive weight but no transitions");
      }
      ++skipped_undefined;
      continue;
    }
    if (pi[i] == 0.0) continue;
    h += pi[i] * row_entropy(P.row(s));
  }
  if (warnings != nullptr && skipped_undefined > 0) {
    warnings->push_back(std::to_string(skipped_undefined) +
                        " state(s) with no observed outgoing transitions given zero weight");
  }
  return std::max(h, 0.0);
}

Method method_tag(StationaryMethod method) {
  switch (method) {
    case StationaryMethod::empirical: return Method::direct_empirical;
    case StationaryMethod::eigen: return Method::direct_eigen;
    case StationaryMethod::limit: return Method::direct_limit;
  }
  return Method::direct_empirical;
}

EntropyEstimate estimate_direct(const Sequence& seq, std::size_t order, StationaryMethod method,
                                const DirectOptions& options) {
  return estimate_direct(std::span<const Sequence>(&seq, 1), order, method, options);
}

EntropyEstimate estimate_direct(std::span<const Sequence> segments, std::size_t order,
                                StationaryMethod method, const DirectOptions& options) {
  if (segments.empty()) throw InputError("no sequence given");
  if (order == 0) throw InputError("order must be positive");

  EntropyEstimate est;
  est.method = method_tag(method);
  est.order = order;

  const std::size_t kappa = segments.front().kappa();
  std::vector<Sequence> embedded;
  for (const auto& seg : segments) {
    est.n_obs += seg.size();
    if (seg.size() > order) embedded.push_back(embed_order(seg, order));
  }
  if (embedded.empty()) {
    throw InputError("sequence of length " + std::to_string(est.n_obs) +
                     " is too short for order " + std::to_string(order));
  }

  // n <= kappa^m means the transition matrix cannot be estimated reliably.
  {
    double states = 1.0;
    for (std::size_t k = 0; k < order; ++k) states *= static_cast<double>(kappa);
    if (static_cast<double>(est.n_obs) <= states) {
      est.warnings.push_back("sequence length " + std::to_string(est.n_obs) + " <= kappa^m = " +
                             std::to_string(static_cast<long long>(states)) +
                             "; order-" + std::to_string(order) + " estimate is unreliable");
    }
  }

  const auto compact = compact_states(embedded);
  const auto counts = count_transitions(compact);
  const auto P = mle_transition_matrix(counts);
  est.irreducible = is_irreducible(P);

  if (method != StationaryMethod::empirical && !est.irreducible) {
    if (!options.paper_zero_mode) {
      throw ReducibleMatrixError("estimated order-" + std::to_string(order) +
                                 " transition matrix is not irreducible");
    }
    est.value = 0.0;
    est.warnings.push_back("estimated transition matrix is reducible; estimate set to 0");
    return est;
  }

  switch (method) {
    case StationaryMethod::empirical:
      est.value = entropy_rate(P, stationary_empirical(counts), &est.warnings);
      break;
    case StationaryMethod::eigen:
      est.value = entropy_rate(P, stationary_eigen(P), &est.warnings);
      break;
    case StationaryMethod::limit: {
      const auto avg = stationary_limit(P, options.cesaro_terms);
      if (!avg.converged()) {
        est.warnings.push_back("Cesaro average not converged (half-gap " + std::to_string(avg.half_gap) +
                               ")");
      }
      est.value = entropy_rate(P, avg.distribution, &est.warnings);
      break;
    }
  }
  return est;
}

}  // namespace entrate
