#pragma once

// Finite-state sequences, transition counting and the m-tuple embedding
// that turns an order-m chain into a first-order chain on composite states.

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace entrate {

using State = std::uint32_t;

// Composite state spaces larger than this are rejected outright.
inline constexpr std::size_t kMaxCompositeStates = std::size_t{1} << 24;

// Count tables up to this many states are stored densely.
inline constexpr std::size_t kDenseCountLimit = 4096;

class Alphabet {
 public:
  explicit Alphabet(std::vector<std::string> symbols);

  // Labels "0", "1", ..., "kappa-1".
  static Alphabet indexed(std::size_t kappa);

  std::size_t size() const { return symbols_.size(); }
  const std::string& symbol(State s) const { return symbols_.at(s); }
  const std::vector<std::string>& symbols() const { return symbols_; }
  std::optional<State> find(std::string_view label) const;

  bool operator==(const Alphabet& other) const { return symbols_ == other.symbols_; }

 private:
  std::vector<std::string> symbols_;
  std::unordered_map<std::string, State> index_;
};

// An observed realization x_0 ... x_T as state indices in [0, kappa).
class Sequence {
 public:
  Sequence(std::vector<State> states, std::size_t kappa);

  std::span<const State> states() const { return states_; }
  std::size_t size() const { return states_.size(); }
  std::size_t kappa() const { return kappa_; }
  State operator[](std::size_t t) const { return states_[t]; }

  // First n observations; 1 <= n <= size().
  Sequence prefix(std::size_t n) const;

  bool operator==(const Sequence& other) const = default;

 private:
  std::vector<State> states_;
  std::size_t kappa_;
};

// Bijection between ordered m-tuples of base states and [0, kappa^m).
// Tuples are passed oldest symbol first; the encoding weights the newest
// symbol most heavily: index = sum_k x_{t+k} * kappa^k.
class CompositeAlphabet {
 public:
  CompositeAlphabet(std::size_t base_kappa, std::size_t order);

  std::size_t base_size() const { return base_; }
  std::size_t order() const { return order_; }
  std::size_t size() const { return size_; }

  State encode(std::span<const State> oldest_first) const;
  std::vector<State> decode(State index) const;

 private:
  std::size_t base_;
  std::size_t order_;
  std::size_t size_;
};

// Sequence of overlapping m-tuples; length seq.size() - m + 1.
Sequence embed_order(const Sequence& seq, std::size_t order);

class TransitionCounts {
 public:
  // Builds a table from explicit counts (rows of equal length).
  static TransitionCounts from_table(const std::vector<std::vector<std::uint64_t>>& table);

  std::size_t size() const { return size_; }
  bool is_dense() const { return size_ <= kDenseCountLimit; }

  std::uint64_t at(State from, State to) const;
  std::uint64_t row_total(State from) const;
  std::uint64_t grand_total() const { return grand_total_; }

  // Nonzero entries of a row, ascending by destination.
  std::vector<std::pair<State, std::uint64_t>> row(State from) const;

 private:
  explicit TransitionCounts(std::size_t size);
  void add(State from, State to, std::uint64_t n);

  friend TransitionCounts count_transitions(std::span<const Sequence> segments);

  std::size_t size_;
  std::uint64_t grand_total_ = 0;
  std::vector<std::uint64_t> dense_;
  std::vector<std::uint64_t> dense_totals_;
  std::unordered_map<State, std::map<State, std::uint64_t>> sparse_;
  std::unordered_map<State, std::uint64_t> sparse_totals_;
};

TransitionCounts count_transitions(const Sequence& seq);

// Sums transitions within each segment; no transition is counted across
// segment boundaries. All segments must share the same kappa.
TransitionCounts count_transitions(std::span<const Sequence> segments);

struct TransitionEntry {
  State to;
  double prob;
};

// Row-stochastic matrix stored by nonzero entries. Rows with no observed
// transitions are kept as explicitly undefined rather than filled in.
class TransitionMatrix {
 public:
  // Accepts rows that sum to 1 within 1e-9 (renormalized exactly) or rows
  // of all zeros, which become undefined rows.
  static TransitionMatrix from_rows(const std::vector<std::vector<double>>& rows);

  std::size_t size() const { return rows_.size(); }
  double at(State from, State to) const;
  std::span<const TransitionEntry> row(State from) const { return rows_.at(from); }
  bool is_defined(State from) const { return defined_.at(from); }
  bool all_rows_defined() const;
  std::vector<std::vector<double>> dense() const;

 private:
  TransitionMatrix(std::vector<std::vector<TransitionEntry>> rows, std::vector<bool> defined);

  friend TransitionMatrix mle_transition_matrix(const TransitionCounts& counts);

  std::vector<std::vector<TransitionEntry>> rows_;
  std::vector<bool> defined_;
};

TransitionMatrix mle_transition_matrix(const TransitionCounts& counts);

// True iff every row is defined and the graph of positive entries is
// strongly connected.
bool is_irreducible(const TransitionMatrix& P);

class ProbabilityVector {
 public:
  // Entries must be >= 0 and sum to 1 within 1e-9; the stored vector is
  // renormalized so that it sums to 1 to rounding.
  explicit ProbabilityVector(std::vector<double> probs);

  static ProbabilityVector point_mass(std::size_t size, State at);
  static ProbabilityVector uniform(std::size_t size);

  std::size_t size() const { return probs_.size(); }
  double operator[](std::size_t i) const { return probs_[i]; }
  std::span<const double> values() const { return probs_; }

 private:
  std::vector<double> probs_;
};

}  // namespace entrate
