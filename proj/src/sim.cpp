#include "entrate/sim.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

#include "entrate/bootstrap.hpp"
#include "entrate/direct.hpp"
#include "entrate/errors.hpp"
#include "parallel.hpp"

namespace entrate {

namespace {

// Row-wise cumulative distributions for inverse-CDF sampling.
class RowSampler {
 public:
  explicit RowSampler(const TransitionMatrix& P) : rows_(P.size()) {
    for (std::size_t i = 0; i < P.size(); ++i) {
      if (!P.is_defined(static_cast<State>(i))) continue;
      double cum = 0.0;
      for (const auto& e : P.row(static_cast<State>(i))) {
        cum += e.prob;
        rows_[i].push_back({e.to, cum});
      }
    }
  }

  State next(State from, Rng& rng) const {
    const auto& row = rows_[from];
    if (row.empty()) throw NumericError("simulation reached state " + std::to_string(from) + " with no transitions");
    return draw(row, rng);
  }

  static State draw(const std::vector<TransitionEntry>& cumulative, Rng& rng) {
    const double u = std::uniform_real_distribution<double>(0.0, cumulative.back().prob)(rng);
    for (const auto& e : cumulative) {
      if (u < e.prob) return e.to;
    }
    return cumulative.back().to;
  }

 private:
  std::vector<std::vector<TransitionEntry>> rows_;
};

State draw_initial(const TransitionMatrix& P, const ChainStart& start, Rng& rng) {
  const auto from_distribution = [&](const ProbabilityVector& pi) {
    if (pi.size() != P.size()) throw InputError("initial distribution has the wrong dimension");
    std::vector<TransitionEntry> cumulative;
    double cum = 0.0;
    for (std::size_t i = 0; i < pi.size(); ++i) {
      if (pi[i] <= 0.0) continue;
      cum += pi[i];
      cumulative.push_back({static_cast<State>(i), cum});
    }
    return RowSampler::draw(cumulative, rng);
  };
  if (std::holds_alternative<State>(start)) {
    const State s = std::get<State>(start);
    if (s >= P.size()) throw InputError("initial state outside the state space");
    return s;
  }
  if (std::holds_alternative<ProbabilityVector>(start)) {
    return from_distribution(std::get<ProbabilityVector>(start));
  }
  return from_distribution(stationary_eigen(P));
}

// 8 x 8 stand-in for a chain of intermediate predictability.
constexpr std::array<std::array<double, 8>, 8> kMediumMatrix{{
    {0.88, 0.04, 0.02, 0.02, 0.01, 0.01, 0.01, 0.01},
    {0.05, 0.80, 0.08, 0.03, 0.01, 0.01, 0.01, 0.01},
    {0.02, 0.10, 0.70, 0.12, 0.03, 0.01, 0.01, 0.01},
    {0.02, 0.03, 0.15, 0.60, 0.15, 0.03, 0.01, 0.01},
    {0.01, 0.02, 0.05, 0.15, 0.55, 0.15, 0.05, 0.02},
    {0.02, 0.02, 0.03, 0.05, 0.18, 0.50, 0.15, 0.05},
    {0.03, 0.03, 0.04, 0.05, 0.08, 0.20, 0.45, 0.12},
    {0.10, 0.05, 0.05, 0.05, 0.05, 0.10, 0.20, 0.40},
}};

double binary_entropy(double x) { return shannon_entropy(std::array<double, 2>{x, 1.0 - x}); }

}  // namespace

Sequence simulate_chain(const TransitionMatrix& P, std::size_t n, const ChainStart& start, Rng& rng) {
  if (n == 0) throw InputError("simulation length must be positive");
  const RowSampler sampler(P);
  std::vector<State> x;
  x.reserve(n);
  x.push_back(draw_initial(P, start, rng));
  while (x.size() < n) x.push_back(sampler.next(x.back(), rng));
  return Sequence(std::move(x), P.size());
}

std::string_view to_string(BenchmarkKind kind) {
  switch (kind) {
    case BenchmarkKind::low: return "low";
    case BenchmarkKind::high: return "high";
    case BenchmarkKind::medium: return "medium-builtin";
  }
  return "unknown";
}

BenchmarkKind parse_benchmark(std::string_view name) {
  if (name == "low") return BenchmarkKind::low;
  if (name == "high") return BenchmarkKind::high;
  if (name == "medium" || name == "medium-builtin") return BenchmarkKind::medium;
  throw InputError("unknown benchmark matrix '" + std::string(name) + "'");
}

TransitionMatrix benchmark_matrix(BenchmarkKind kind, std::size_t kappa, double diag) {
  if (kappa < 2) throw InputError("benchmark matrices need kappa >= 2");
  std::vector<std::vector<double>> rows(kappa, std::vector<double>(kappa));
  switch (kind) {
    case BenchmarkKind::low: {
      if (!(diag >= 0.0 && diag <= 1.0)) throw InputError("diagonal probability must lie in [0, 1]");
      const double off = (1.0 - diag) / static_cast<double>(kappa - 1);
      for (std::size_t i = 0; i < kappa; ++i) {
        for (std::size_t j = 0; j < kappa; ++j) rows[i][j] = i == j ? diag : off;
      }
      break;
    }
    case BenchmarkKind::high:
      for (auto& row : rows) std::fill(row.begin(), row.end(), 1.0 / static_cast<double>(kappa));
      break;
    case BenchmarkKind::medium:
      if (kappa != kMediumMatrix.size()) throw InputError("the built-in medium matrix has 8 states");
      for (std::size_t i = 0; i < kappa; ++i) rows[i].assign(kMediumMatrix[i].begin(), kMediumMatrix[i].end());
      break;
  }
  return TransitionMatrix::from_rows(rows);
}

double analytic_entropy_rate(const TransitionMatrix& P) { return entropy_rate(P, stationary_eigen(P)); }

void SecondOrderParams::validate() const {
  for (double v : {a, b, c, d}) {
    if (!(v >= 0.0 && v <= 1.0)) throw InputError("second-order parameters must lie in [0, 1]");
  }
}

double phi_upper_bound(double p) { return std::min(p / (1.0 - p), (1.0 - p) / p); }

bool within_bounds(const ReparamPoint& point) {
  const auto open_unit = [](double v) { return v > 0.0 && v < 1.0; };
  if (!open_unit(point.p) || !open_unit(point.q)) return false;
  constexpr double slack = 1e-12;
  return point.phi >= -1.0 && point.phi <= phi_upper_bound(point.p) + slack && point.gamma >= -1.0 &&
         point.gamma <= phi_upper_bound(point.q) + slack;
}

TransitionMatrix second_order_matrix(const SecondOrderParams& params) {
  params.validate();
  const auto [a, b, c, d] = params;
  return TransitionMatrix::from_rows({
      {1.0 - a, a, 0.0, 0.0},
      {0.0, 0.0, b, 1.0 - b},
      {1.0 - c, c, 0.0, 0.0},
      {0.0, 0.0, d, 1.0 - d},
  });
}

SecondOrderParams reparam_to_abcd(const ReparamPoint& point) {
  if (!within_bounds(point)) {
    throw InputError("(phi, gamma) outside -1 <= phi <= min(p/(1-p), (1-p)/p), "
                     "-1 <= gamma <= min(q/(1-q), (1-q)/q)");
  }
  const auto clamp01 = [](double v) { return std::clamp(v, 0.0, 1.0); };
  SecondOrderParams out;
  out.a = clamp01(point.p * (1.0 + point.phi));
  out.c = clamp01(1.0 - (1.0 - point.p) * (1.0 + point.phi));
  out.d = clamp01(point.q * (1.0 + point.gamma));
  out.b = clamp01(1.0 - (1.0 - point.q) * (1.0 + point.gamma));
  return out;
}

ReparamPoint abcd_to_reparam(const SecondOrderParams& params) {
  const auto P1 = first_order_projection(params);
  ReparamPoint out;
  out.p = P1.at(0, 1);
  out.q = P1.at(1, 0);
  out.phi = params.a / out.p - 1.0;
  out.gamma = params.d / out.q - 1.0;
  return out;
}

TransitionMatrix reparam_matrix(const ReparamPoint& point) {
  if (!within_bounds(point) || point.phi == -1.0 || point.gamma == -1.0) {
    throw InputError("(phi, gamma) outside the domain of the reparameterized matrix");
  }
  const double p = point.p, q = point.q, f = 1.0 + point.phi, g = 1.0 + point.gamma;
  auto rows = std::vector<std::vector<double>>{
      {f * (1.0 / f - p), p * f, 0.0, 0.0},
      {0.0, 0.0, g * (q - point.gamma / g), (1.0 - q) * g},
      {(1.0 - p) * f, f * (p - point.phi / f), 0.0, 0.0},
      {0.0, 0.0, q * g, g * (1.0 / g - q)},
  };
  // Entries that are zero analytically can come out as -1e-17.
  for (auto& row : rows) {
    for (double& v : row) {
      if (v < 0.0 && v > -1e-12) v = 0.0;
    }
  }
  return TransitionMatrix::from_rows(rows);
}

ProbabilityVector second_order_stationary(const SecondOrderParams& params) {
  params.validate();
  const auto [a, b, c, d] = params;
  const double psi = a * (1.0 - b) + 2.0 * d * a + d * (1.0 - c);
  if (!(psi > 0.0)) throw ReducibleMatrixError("second-order chain has no unique stationary distribution");
  return ProbabilityVector({d * (1.0 - c) / psi, d * a / psi, d * a / psi, a * (1.0 - b) / psi});
}

double second_order_entropy_rate(const SecondOrderParams& params) {
  const auto pi = second_order_stationary(params);
  return pi[0] * binary_entropy(params.a) + pi[1] * binary_entropy(params.b) + pi[2] * binary_entropy(params.c) +
         pi[3] * binary_entropy(params.d);
}

TransitionMatrix first_order_projection(const SecondOrderParams& params) {
  if (!is_irreducible(second_order_matrix(params))) {
    throw ReducibleMatrixError("second-order chain is reducible; no first-order projection");
  }
  const auto [a, b, c, d] = params;
  const double from_a = (1.0 - c) + a;
  const double from_b = d + (1.0 - b);
  return TransitionMatrix::from_rows({
      {(1.0 - c) / from_a, a / from_a},
      {d / from_b, (1.0 - b) / from_b},
  });
}

std::vector<double> linear_grid(double lo, double hi, std::size_t n) {
  if (n < 2) throw InputError("a grid needs at least 2 points");
  std::vector<double> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    double v = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(n - 1);
    if (std::abs(v) < 1e-12) v = 0.0;
    out[k] = v;
  }
  out.back() = hi;
  return out;
}

EntropySurface entropy_surface(double p, double q, const std::vector<double>& phi_grid,
                               const std::vector<double>& gamma_grid) {
  EntropySurface surface{p, q, phi_grid, gamma_grid, {}};
  surface.values.reserve(phi_grid.size() * gamma_grid.size());
  for (double phi : phi_grid) {
    for (double gamma : gamma_grid) {
      const ReparamPoint point{p, q, phi, gamma};
      std::optional<double> value;
      if (within_bounds(point) && phi > -1.0 && gamma > -1.0) {
        const auto P2 = reparam_matrix(point);
        const SecondOrderParams params{P2.at(0, 1), P2.at(1, 2), P2.at(2, 1), P2.at(3, 2)};
        if (is_irreducible(P2)) value = entropy_rate(P2, second_order_stationary(params));
      }
      surface.values.push_back(value);
    }
  }
  return surface;
}

Sequence simulate_second_order(const SecondOrderParams& params, std::size_t n, Rng& rng) {
  if (n < 2) throw InputError("second-order simulation needs n >= 2");
  const auto P2 = second_order_matrix(params);
  const auto pairs = simulate_chain(P2, n - 1, ProbabilityVector(second_order_stationary(params)), rng);
  std::vector<State> x;
  x.reserve(n);
  x.push_back(pairs[0] >> 1);
  for (State pair : pairs.states()) x.push_back(pair & 1u);
  return Sequence(std::move(x), 2);
}

void ExperimentPlan::validate() const {
  if (lengths.empty()) throw InputError("plan field 'lengths': at least one length is required");
  if (lengths.front() < 2) throw InputError("plan field 'lengths': lengths must be >= 2");
  for (std::size_t k = 1; k < lengths.size(); ++k) {
    if (lengths[k] <= lengths[k - 1]) throw InputError("plan field 'lengths': must be strictly increasing");
  }
  if (replicates == 0) throw InputError("plan field 'replicates': must be positive");
  if (estimators.empty()) throw InputError("plan field 'estimators': at least one estimator is required");
  for (const auto& e : estimators) {
    if (is_direct(e.method) && e.order == 0) throw InputError("plan field 'estimators': order must be positive");
  }
  if (bootstrap_replicates == 1) throw InputError("plan field 'bootstrap_replicates': must be 0 or >= 2");
  if (const auto* bench = std::get_if<BenchmarkGenerator>(&generator)) {
    (void)benchmark_matrix(bench->kind, bench->kappa, bench->diag);
  } else if (const auto* params = std::get_if<SecondOrderParams>(&generator)) {
    params->validate();
  }
}

SpreadSummary summarize(const std::vector<double>& values) {
  SpreadSummary s;
  s.count = values.size();
  if (values.empty()) return s;
  auto sorted = values;
  std::sort(sorted.begin(), sorted.end());
  s.min = sorted.front();
  s.max = sorted.back();
  s.mean = std::accumulate(sorted.begin(), sorted.end(), 0.0) / static_cast<double>(sorted.size());
  const std::size_t mid = sorted.size() / 2;
  s.median = sorted.size() % 2 == 1 ? sorted[mid] : 0.5 * (sorted[mid - 1] + sorted[mid]);
  s.sd = sorted.size() >= 2 ? sample_sd(values) : 0.0;
  return s;
}

ExperimentReport run_experiment(const ExperimentPlan& plan) {
  plan.validate();

  std::optional<TransitionMatrix> first_order;
  std::optional<SecondOrderParams> second_order;
  std::optional<double> true_rate;
  if (const auto* bench = std::get_if<BenchmarkGenerator>(&plan.generator)) {
    first_order = benchmark_matrix(bench->kind, bench->kappa, bench->diag);
  } else if (const auto* P = std::get_if<TransitionMatrix>(&plan.generator)) {
    first_order = *P;
  } else {
    second_order = std::get<SecondOrderParams>(plan.generator);
  }
  if (first_order) {
    if (is_irreducible(*first_order)) true_rate = analytic_entropy_rate(*first_order);
  } else {
    true_rate = second_order_entropy_rate(*second_order);
  }

  const std::size_t n_max = plan.lengths.back();
  const std::size_t n_cells = plan.lengths.size() * plan.estimators.size();

  struct Outcome {
    std::optional<double> value;
    bool zeroed = false;
    std::optional<double> se;
    bool se_failed = false;
  };
  std::vector<std::vector<Outcome>> outcomes(plan.replicates, std::vector<Outcome>(n_cells));

  DirectOptions options;
  options.paper_zero_mode = plan.paper_zero_mode;

  detail::parallel_for(plan.replicates, plan.threads, [&](std::size_t r) {
    Rng rng = substream(plan.seed, {0, r});
    const Sequence full = first_order ? simulate_chain(*first_order, n_max, StationaryStart{}, rng)
                                      : simulate_second_order(*second_order, n_max, rng);
    std::size_t cell = 0;
    for (std::size_t length : plan.lengths) {
      const Sequence seq = full.prefix(length);
      for (const auto& spec : plan.estimators) {
        Outcome& out = outcomes[r][cell];
        try {
          const auto est = run_estimator(seq, spec, options);
          out.value = est.value;
          out.zeroed = spec.method != Method::direct_empirical && is_direct(spec.method) && !est.irreducible;
        } catch (const InputError&) {
        } catch (const NumericError&) {
        }
        if (out.value && plan.bootstrap_replicates > 0) {
          BootstrapConfig config;
          config.p = choose_p(*out.value, length).p;
          config.replicates = plan.bootstrap_replicates;
          config.seed = derive_seed(plan.seed, {1, r, cell});
          config.on_failure = plan.paper_zero_mode ? ReplicateFailurePolicy::zero : ReplicateFailurePolicy::drop;
          try {
            out.se = bootstrap_se(seq, spec, config).standard_error;
          } catch (const InputError&) {
            out.se_failed = true;
          } catch (const NumericError&) {
            out.se_failed = true;
          }
        }
        ++cell;
      }
    }
  });

  ExperimentReport report;
  report.plan_name = plan.name;
  report.seed = plan.seed;
  report.replicates = plan.replicates;
  report.true_rate = true_rate;
  std::size_t cell = 0;
  for (std::size_t length : plan.lengths) {
    for (const auto& spec : plan.estimators) {
      ExperimentCell c;
      c.length = length;
      c.estimator = spec;
      std::vector<double> ok, ses;
      for (std::size_t r = 0; r < plan.replicates; ++r) {
        const Outcome& out = outcomes[r][cell];
        c.values.push_back(out.value);
        if (out.value) {
          ok.push_back(*out.value);
        } else {
          ++c.failed;
        }
        if (out.zeroed) ++c.zeroed;
        if (out.se) ses.push_back(*out.se);
        if (out.se_failed) ++c.bootstrap_failed;
      }
      c.estimates = summarize(ok);
      if (plan.bootstrap_replicates > 0) c.bootstrap_se = summarize(ses);
      report.cells.push_back(std::move(c));
      ++cell;
    }
  }
  return report;
}

}  // namespace entrate
