#include "entrate/swlz.hpp"

#include <algorithm>
#include <cmath>

#include "entrate/errors.hpp"

namespace entrate {

SubstringIndex::SubstringIndex() { nodes_.emplace_back(); }

int SubstringIndex::transition(int node, State symbol) const {
  for (const auto& [s, target] : nodes_[static_cast<std::size_t>(node)].next) {
    if (s == symbol) return target;
  }
  return -1;
}

void SubstringIndex::set_transition(int node, State symbol, int target) {
  auto& next = nodes_[static_cast<std::size_t>(node)].next;
  for (auto& [s, t] : next) {
    if (s == symbol) {
      t = target;
      return;
    }
  }
  next.emplace_back(symbol, target);
}

void SubstringIndex::extend(State symbol) {
  const int cur = static_cast<int>(nodes_.size());
  nodes_.push_back(Node{nodes_[static_cast<std::size_t>(last_)].len + 1, -1, {}});
  int p = last_;
  while (p != -1 && transition(p, symbol) == -1) {
    set_transition(p, symbol, cur);
    p = nodes_[static_cast<std::size_t>(p)].link;
  }
  if (p == -1) {
    nodes_[static_cast<std::size_t>(cur)].link = 0;
  } else {
    const int q = transition(p, symbol);
    if (nodes_[static_cast<std::size_t>(p)].len + 1 == nodes_[static_cast<std::size_t>(q)].len) {
      nodes_[static_cast<std::size_t>(cur)].link = q;
    } else {
      const int clone = static_cast<int>(nodes_.size());
      Node copy = nodes_[static_cast<std::size_t>(q)];
      copy.len = nodes_[static_cast<std::size_t>(p)].len + 1;
      nodes_.push_back(std::move(copy));
      while (p != -1 && transition(p, symbol) == q) {
        set_transition(p, symbol, clone);
        p = nodes_[static_cast<std::size_t>(p)].link;
      }
      nodes_[static_cast<std::size_t>(q)].link = clone;
      nodes_[static_cast<std::size_t>(cur)].link = clone;
    }
  }
  last_ = cur;
  ++text_size_;
}

std::size_t SubstringIndex::longest_prefix_match(std::span<const State> pattern) const {
  int node = 0;
  std::size_t matched = 0;
  for (State s : pattern) {
    node = transition(node, s);
    if (node == -1) break;
    ++matched;
  }
  return matched;
}

std::size_t MatchLengths::sum() const {
  std::size_t total = 0;
  for (const auto& m : values_) total += m.length;
  return total;
}

std::size_t MatchLengths::capped_count() const {
  return static_cast<std::size_t>(
      std::count_if(values_.begin(), values_.end(), [](const MatchLength& m) { return m.capped; }));
}

namespace {

MatchLength novelty(const SubstringIndex& history, std::span<const State> suffix) {
  const std::size_t matched = history.longest_prefix_match(suffix);
  return MatchLength{matched + 1, matched == suffix.size()};
}

}  // namespace

MatchLength lambda_at(const Sequence& seq, std::size_t i) {
  if (i == 0) throw InputError("Lambda_0 is undefined: the history is empty");
  if (i >= seq.size()) {
    throw InputError("position " + std::to_string(i) + " is past the end of a length-" +
                     std::to_string(seq.size()) + " sequence");
  }
  const auto x = seq.states();
  SubstringIndex history;
  for (std::size_t t = 0; t < i; ++t) history.extend(x[t]);
  return novelty(history, x.subspan(i));
}

MatchLengths match_lengths(const Sequence& seq) {
  const auto x = seq.states();
  std::vector<MatchLength> out;
  out.reserve(x.size() > 0 ? x.size() - 1 : 0);
  SubstringIndex history;
  for (std::size_t i = 1; i < x.size(); ++i) {
    history.extend(x[i - 1]);
    out.push_back(novelty(history, x.subspan(i)));
  }
  return MatchLengths(std::move(out));
}

Parsing swlz_parse(const Sequence& seq) {
  const auto x = seq.states();
  const std::size_t n = x.size();
  Parsing parsing;
  parsing.phrases.push_back(Phrase{0, 1, false});

  SubstringIndex history;
  history.extend(x[0]);
  std::size_t pos = 1;
  while (pos < n) {
    const auto m = novelty(history, x.subspan(pos));
    const std::size_t len = m.capped ? n - pos : m.length;
    parsing.phrases.push_back(Phrase{pos, len, m.capped});
    for (std::size_t t = pos; t < pos + len; ++t) history.extend(x[t]);
    pos += len;
  }
  return parsing;
}

EntropyEstimate swlz_entropy(const Sequence& seq) {
  const std::size_t n = seq.size();
  if (n < 2) throw InputError("SWLZ estimation needs at least 2 observations");
  const auto lambdas = match_lengths(seq);
  const double mean = static_cast<double>(lambdas.sum()) / static_cast<double>(lambdas.size());

  EntropyEstimate est;
  est.method = Method::swlz;
  est.n_obs = n;
  est.value = std::log2(static_cast<double>(n)) / mean;
  return est;
}

}  // namespace entrate
