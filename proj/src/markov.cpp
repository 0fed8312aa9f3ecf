#include "entrate/markov.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "entrate/errors.hpp"

namespace entrate {

Alphabet::Alphabet(std::vector<std::string> symbols) : symbols_(std::move(symbols)) {
  if (symbols_.empty()) throw InputError("alphabet must contain at least one symbol");
  for (std::size_t i = 0; i < symbols_.size(); ++i) {
    auto [it, inserted] = index_.emplace(symbols_[i], static_cast<State>(i));
    if (!inserted) throw InputError("duplicate alphabet symbol '" + symbols_[i] + "'");
  }
}

Alphabet Alphabet::indexed(std::size_t kappa) {
  std::vector<std::string> labels;
  labels.reserve(kappa);
  for (std::size_t i = 0; i < kappa; ++i) labels.push_back(std::to_string(i));
  return Alphabet(std::move(labels));
}

std::optional<State> Alphabet::find(std::string_view label) const {
  auto it = index_.find(std::string(label));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

Sequence::Sequence(std::vector<State> states, std::size_t kappa)
    : states_(std::move(states)), kappa_(kappa) {
  if (kappa_ == 0) throw InputError("sequence alphabet must be nonempty");
  if (states_.empty()) throw InputError("sequence must contain at least one observation");
  for (std::size_t t = 0; t < states_.size(); ++t) {
    if (states_[t] >= kappa_) {
      throw InputError("state " + std::to_string(states_[t]) + " at position " + std::to_string(t) +
                       " is outside [0, " + std::to_string(kappa_) + ")");
    }
  }
}

Sequence Sequence::prefix(std::size_t n) const {
  if (n == 0 || n > states_.size()) {
    throw InputError("prefix length " + std::to_string(n) + " outside [1, " +
                     std::to_string(states_.size()) + "]");
  }
  return Sequence(std::vector<State>(states_.begin(), states_.begin() + static_cast<std::ptrdiff_t>(n)),
                  kappa_);
}

CompositeAlphabet::CompositeAlphabet(std::size_t base_kappa, std::size_t order)
    : base_(base_kappa), order_(order), size_(1) {
  if (base_ == 0) throw InputError("base alphabet must be nonempty");
  if (order_ == 0) throw InputError("order must be positive");
  for (std::size_t k = 0; k < order_; ++k) {
    if (size_ > kMaxCompositeStates / base_) {
      throw InputError("composite state space kappa^m exceeds " + std::to_string(kMaxCompositeStates) +
                       " states");
    }
    size_ *= base_;
  }
}

State CompositeAlphabet::encode(std::span<const State> oldest_first) const {
  if (oldest_first.size() != order_) throw InputError("tuple length does not match order");
  std::size_t index = 0;
  for (std::size_t k = order_; k-- > 0;) {
    if (oldest_first[k] >= base_) throw InputError("tuple symbol outside base alphabet");
    index = index * base_ + oldest_first[k];
  }
  return static_cast<State>(index);
}

std::vector<State> CompositeAlphabet::decode(State index) const {
  if (index >= size_) throw InputError("composite index out of range");
  std::vector<State> tuple(order_);
  std::size_t rest = index;
  for (std::size_t k = 0; k < order_; ++k) {
    tuple[k] = static_cast<State>(rest % base_);
    rest /= base_;
  }
  return tuple;
}

Sequence embed_order(const Sequence& seq, std::size_t order) {
  if (order == 0) throw InputError("order must be positive");
  if (seq.size() < order) throw InputError("insufficient length for order " + std::to_string(order));
  if (order == 1) return seq;

  const CompositeAlphabet composite(seq.kappa(), order);
  const auto x = seq.states();
  std::vector<State> out;
  out.reserve(x.size() - order + 1);
  for (std::size_t t = 0; t + order <= x.size(); ++t) {
    out.push_back(composite.encode(x.subspan(t, order)));
  }
  return Sequence(std::move(out), composite.size());
}

TransitionCounts::TransitionCounts(std::size_t size) : size_(size) {
  if (size_ == 0) throw InputError("count table must have at least one state");
  if (is_dense()) {
    dense_.assign(size_ * size_, 0);
    dense_totals_.assign(size_, 0);
  }
}

void TransitionCounts::add(State from, State to, std::uint64_t n) {
  if (is_dense()) {
    dense_[static_cast<std::size_t>(from) * size_ + to] += n;
    dense_totals_[from] += n;
  } else {
    sparse_[from][to] += n;
    sparse_totals_[from] += n;
  }
  grand_total_ += n;
}

TransitionCounts TransitionCounts::from_table(const std::vector<std::vector<std::uint64_t>>& table) {
  TransitionCounts counts(table.size());
  for (std::size_t i = 0; i < table.size(); ++i) {
    if (table[i].size() != table.size()) throw InputError("count table must be square");
    for (std::size_t j = 0; j < table.size(); ++j) {
      if (table[i][j] != 0) counts.add(static_cast<State>(i), static_cast<State>(j), table[i][j]);
    }
  }
  return counts;
}

std::uint64_t TransitionCounts::at(State from, State to) const {
  if (from >= size_ || to >= size_) throw InputError("count index out of range");
  if (is_dense()) return dense_[static_cast<std::size_t>(from) * size_ + to];
  auto row_it = sparse_.find(from);
  if (row_it == sparse_.end()) return 0;
  auto it = row_it->second.find(to);
  return it == row_it->second.end() ? 0 : it->second;
}

std::uint64_t TransitionCounts::row_total(State from) const {
  if (from >= size_) throw InputError("count index out of range");
  if (is_dense()) return dense_totals_[from];
  auto it = sparse_totals_.find(from);
  return it == sparse_totals_.end() ? 0 : it->second;
}

std::vector<std::pair<State, std::uint64_t>> TransitionCounts::row(State from) const {
  if (from >= size_) throw InputError("count index out of range");
  std::vector<std::pair<State, std::uint64_t>> out;
  if (is_dense()) {
    for (std::size_t j = 0; j < size_; ++j) {
      const auto n = dense_[static_cast<std::size_t>(from) * size_ + j];
      if (n != 0) out.emplace_back(static_cast<State>(j), n);
    }
  } else if (auto it = sparse_.find(from); it != sparse_.end()) {
    out.assign(it->second.begin(), it->second.end());
  }
  return out;
}

TransitionCounts count_transitions(const Sequence& seq) {
  return count_transitions(std::span<const Sequence>(&seq, 1));
}

TransitionCounts count_transitions(std::span<const Sequence> segments) {
  if (segments.empty()) throw InputError("no transitions observed");
  const std::size_t kappa = segments.front().kappa();
  TransitionCounts counts(kappa);
  for (const auto& seg : segments) {
    if (seg.kappa() != kappa) throw InputError("segments use different alphabets");
    const auto x = seg.states();
    for (std::size_t t = 1; t < x.size(); ++t) counts.add(x[t - 1], x[t], 1);
  }
  if (counts.grand_total() == 0) throw InputError("no transitions observed");
  return counts;
}

TransitionMatrix::TransitionMatrix(std::vector<std::vector<TransitionEntry>> rows, std::vector<bool> defined)
    : rows_(std::move(rows)), defined_(std::move(defined)) {}

TransitionMatrix TransitionMatrix::from_rows(const std::vector<std::vector<double>>& rows) {
  const std::size_t n = rows.size();
  if (n == 0) throw InputError("transition matrix must have at least one state");
  std::vector<std::vector<TransitionEntry>> sparse(n);
  std::vector<bool> defined(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    if (rows[i].size() != n) throw InputError("transition matrix must be square");
    double sum = 0.0;
    for (double v : rows[i]) {
      if (!std::isfinite(v) || v < 0.0 || v > 1.0) {
        throw InputError("transition probabilities must lie in [0, 1] (row " + std::to_string(i) + ")");
      }
      sum += v;
    }
    if (sum == 0.0) continue;
    if (std::abs(sum - 1.0) > 1e-9) {
      throw InputError("row " + std::to_string(i) + " sums to " + std::to_string(sum) + ", not 1");
    }
    defined[i] = true;
    for (std::size_t j = 0; j < n; ++j) {
      if (rows[i][j] > 0.0) sparse[i].push_back({static_cast<State>(j), rows[i][j] / sum});
    }
  }
  return TransitionMatrix(std::move(sparse), std::move(defined));
}

double TransitionMatrix::at(State from, State to) const {
  for (const auto& e : rows_.at(from)) {
    if (e.to == to) return e.prob;
  }
  if (to >= rows_.size()) throw InputError("matrix index out of range");
  return 0.0;
}

bool TransitionMatrix::all_rows_defined() const {
  return std::all_of(defined_.begin(), defined_.end(), [](bool d) { return d; });
}

std::vector<std::vector<double>> TransitionMatrix::dense() const {
  std::vector<std::vector<double>> out(size(), std::vector<double>(size(), 0.0));
  for (std::size_t i = 0; i < size(); ++i) {
    for (const auto& e : rows_[i]) out[i][e.to] = e.prob;
  }
  return out;
}

TransitionMatrix mle_transition_matrix(const TransitionCounts& counts) {
  if (counts.grand_total() == 0) throw InputError("all-zero transition counts");
  const std::size_t n = counts.size();
  std::vector<std::vector<TransitionEntry>> rows(n);
  std::vector<bool> defined(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    const auto total = counts.row_total(static_cast<State>(i));
    if (total == 0) continue;
    defined[i] = true;
    for (const auto& [j, nij] : counts.row(static_cast<State>(i))) {
      rows[i].push_back({j, static_cast<double>(nij) / static_cast<double>(total)});
    }
  }
  return TransitionMatrix(std::move(rows), std::move(defined));
}

namespace {

std::vector<bool> reachable_from_zero(const std::vector<std::vector<State>>& adjacency) {
  std::vector<bool> seen(adjacency.size(), false);
  std::vector<State> stack{0};
  seen[0] = true;
  while (!stack.empty()) {
    const State u = stack.back();
    stack.pop_back();
    for (State v : adjacency[u]) {
      if (!seen[v]) {
        seen[v] = true;
        stack.push_back(v);
      }
    }
  }
  return seen;
}

}  // namespace

bool is_irreducible(const TransitionMatrix& P) {
  if (!P.all_rows_defined()) return false;
  const std::size_t n = P.size();
  std::vector<std::vector<State>> forward(n), backward(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (const auto& e : P.row(static_cast<State>(i))) {
      if (e.prob > 0.0) {
        forward[i].push_back(e.to);
        backward[e.to].push_back(static_cast<State>(i));
      }
    }
  }
  const auto all = [](const std::vector<bool>& v) {
    return std::all_of(v.begin(), v.end(), [](bool b) { return b; });
  };
  return all(reachable_from_zero(forward)) && all(reachable_from_zero(backward));
}

ProbabilityVector::ProbabilityVector(std::vector<double> probs) : probs_(std::move(probs)) {
  if (probs_.empty()) throw InputError("probability vector must be nonempty");
  double sum = 0.0;
  for (double p : probs_) {
    if (!std::isfinite(p) || p < 0.0) throw InputError("probabilities must be finite and nonnegative");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw InputError("probability vector sums to " + std::to_string(sum) + ", not 1");
  }
  for (double& p : probs_) p /= sum;
}

ProbabilityVector ProbabilityVector::point_mass(std::size_t size, State at) {
  if (at >= size) throw InputError("point mass outside state space");
  std::vector<double> v(size, 0.0);
  v[at] = 1.0;
  return ProbabilityVector(std::move(v));
}

ProbabilityVector ProbabilityVector::uniform(std::size_t size) {
  if (size == 0) throw InputError("probability vector must be nonempty");
  return ProbabilityVector(std::vector<double>(size, 1.0 / static_cast<double>(size)));
}

}  // namespace entrate
