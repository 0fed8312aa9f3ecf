#pragma once

// Sliding-window Lempel-Ziv machinery with an expanding history.
//
// For position i >= 1, Lambda_i is the length of the shortest substring
// starting at i that does not occur anywhere inside the history
// x_0 ... x_{i-1}. A match must lie wholly in the history; it may not run
// into position i. When the whole remaining suffix occurs in the history,
// Lambda_i = (n - i) + 1 and the position is marked capped.

#include <cstddef>
#include <span>
#include <vector>

#include "entrate/estimate.hpp"
#include "entrate/markov.hpp"

namespace entrate {

// Online suffix automaton over the growing history. extend() is amortized
// O(1) per symbol (times the per-node transition scan).
class SubstringIndex {
 public:
  SubstringIndex();

  void extend(State symbol);
  std::size_t text_size() const { return text_size_; }

  // Length of the longest prefix of `pattern` occurring in the indexed text.
  std::size_t longest_prefix_match(std::span<const State> pattern) const;

 private:
  struct Node {
    std::size_t len = 0;
    int link = -1;
    std::vector<std::pair<State, int>> next;
  };

  int transition(int node, State symbol) const;
  void set_transition(int node, State symbol, int target);

  std::vector<Node> nodes_;
  int last_ = 0;
  std::size_t text_size_ = 0;
};

struct MatchLength {
  std::size_t length = 0;
  bool capped = false;
};

// Lambda_i for i = 1 ... n-1.
class MatchLengths {
 public:
  explicit MatchLengths(std::vector<MatchLength> by_position) : values_(std::move(by_position)) {}

  // Number of positions, n - 1.
  std::size_t size() const { return values_.size(); }
  const MatchLength& at(std::size_t i) const { return values_.at(i - 1); }
  std::size_t sum() const;
  std::size_t capped_count() const;

 private:
  std::vector<MatchLength> values_;
};

MatchLength lambda_at(const Sequence& seq, std::size_t i);
MatchLengths match_lengths(const Sequence& seq);

struct Phrase {
  std::size_t start = 0;
  std::size_t length = 0;
  bool capped = false;  // ran out of symbols before becoming novel
};

struct Parsing {
  std::vector<Phrase> phrases;
};

// Greedy parse into shortest novel substrings; the final phrase may be
// capped (not novel).
Parsing swlz_parse(const Sequence& seq);

// log2(n) divided by the mean of Lambda_1 ... Lambda_{n-1}.
EntropyEstimate swlz_entropy(const Sequence& seq);

}  // namespace entrate
