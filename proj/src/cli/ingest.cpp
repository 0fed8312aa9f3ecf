#include "entrate/cli/ingest.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "entrate/errors.hpp"

namespace entrate::cli {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n\v\f");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n\v\f");
  return s.substr(first, last - first + 1);
}

}  // namespace

Sequence LoadedSequence::concatenated() const {
  std::vector<State> joined;
  for (const auto& seg : segments) joined.insert(joined.end(), seg.states().begin(), seg.states().end());
  return Sequence(std::move(joined), alphabet.size());
}

std::vector<std::string> tokenize(std::string_view text, TokenFormat format) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const auto line = trim(text.substr(pos, end - pos));
    pos = end + 1;
    if (line.empty() || line.front() == '#') continue;
    if (format == TokenFormat::lines) {
      out.emplace_back(line);
      continue;
    }
    std::istringstream words{std::string(line)};
    std::string word;
    while (words >> word) out.push_back(word);
  }
  return out;
}

std::vector<std::string> collapse_repeats(const std::vector<std::string>& tokens) {
  std::vector<std::string> out;
  for (const auto& t : tokens) {
    if (out.empty() || out.back() != t) out.push_back(t);
  }
  return out;
}

Sequence collapse_repeats(const Sequence& seq) {
  std::vector<State> out;
  for (State s : seq.states()) {
    if (out.empty() || out.back() != s) out.push_back(s);
  }
  return Sequence(std::move(out), seq.kappa());
}

LoadedSequence ingest_texts(const std::vector<std::string>& texts, const std::vector<std::string>& sources,
                            const IngestOptions& options) {
  if (texts.empty()) throw InputError("no input given");
  std::vector<std::vector<std::string>> windows;
  for (std::size_t k = 0; k < texts.size(); ++k) {
    auto tokens = tokenize(texts[k], options.format);
    const std::string& name = k < sources.size() ? sources[k] : "input " + std::to_string(k + 1);
    if (tokens.empty()) throw InputError(name + ": no symbols found");
    if (options.collapse_repeats) tokens = collapse_repeats(tokens);
    windows.push_back(std::move(tokens));
  }

  std::optional<Alphabet> alphabet = options.declared_alphabet;
  if (alphabet) {
    std::set<std::string> unknown;
    for (const auto& w : windows) {
      for (const auto& t : w) {
        if (!alphabet->find(t)) unknown.insert(t);
      }
    }
    if (!unknown.empty()) {
      std::string list;
      for (const auto& t : unknown) list += (list.empty() ? "" : ", ") + t;
      throw InputError("symbols not in the declared alphabet: " + list);
    }
  } else {
    std::set<std::string> distinct;
    for (const auto& w : windows) distinct.insert(w.begin(), w.end());
    alphabet.emplace(std::vector<std::string>(distinct.begin(), distinct.end()));
  }

  LoadedSequence loaded{*alphabet, {}, sources};
  std::size_t total = 0;
  for (const auto& w : windows) {
    std::vector<State> states;
    states.reserve(w.size());
    for (const auto& t : w) states.push_back(*alphabet->find(t));
    total += states.size();
    loaded.segments.emplace_back(std::move(states), alphabet->size());
  }
  if (total < 2) {
    throw InputError(options.collapse_repeats ? "fewer than 2 symbols remain after collapsing repeats"
                                              : "at least 2 symbols are required");
  }
  return loaded;
}

std::string read_text_file(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw InputError("cannot open '" + file.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

LoadedSequence ingest(const std::vector<std::filesystem::path>& files, const IngestOptions& options) {
  std::vector<std::string> texts, sources;
  for (const auto& f : files) {
    texts.push_back(read_text_file(f));
    sources.push_back(f.string());
  }
  return ingest_texts(texts, sources, options);
}

Alphabet read_alphabet(const std::filesystem::path& file) {
  auto symbols = tokenize(read_text_file(file), TokenFormat::tokens);
  if (symbols.empty()) throw InputError("alphabet file '" + file.string() + "' is empty");
  return Alphabet(std::move(symbols));
}

}  // namespace entrate::cli
