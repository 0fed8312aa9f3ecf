#pragma once

// Reading observation files into sequences.
//
// Files are UTF-8 text. In `tokens` format symbols are separated by any
// whitespace; in `lines` format each non-blank line is one symbol. Lines
// starting with '#' are comments in both formats.

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "entrate/markov.hpp"

namespace entrate::cli {

enum class TokenFormat { tokens, lines };

struct IngestOptions {
  TokenFormat format = TokenFormat::tokens;
  std::optional<Alphabet> declared_alphabet;
  bool collapse_repeats = false;
};

// One window of observations per input file, all over a shared alphabet.
struct LoadedSequence {
  Alphabet alphabet;
  std::vector<Sequence> segments;
  std::vector<std::string> sources;

  // Windows joined end to end; boundary transitions are kept.
  Sequence concatenated() const;
};

std::vector<std::string> tokenize(std::string_view text, TokenFormat format);

// Merges runs of identical consecutive symbols into one occurrence.
std::vector<std::string> collapse_repeats(const std::vector<std::string>& tokens);
Sequence collapse_repeats(const Sequence& seq);

// Each entry of `texts` is one observation window; `sources` names them in
// error messages.
LoadedSequence ingest_texts(const std::vector<std::string>& texts, const std::vector<std::string>& sources,
                            const IngestOptions& options);

LoadedSequence ingest(const std::vector<std::filesystem::path>& files, const IngestOptions& options);

// Alphabet file: the ordered symbol list in `tokens` format.
Alphabet read_alphabet(const std::filesystem::path& file);

std::string read_text_file(const std::filesystem::path& file);

}  // namespace entrate::cli
