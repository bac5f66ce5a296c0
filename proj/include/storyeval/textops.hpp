#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "storyeval/schema.hpp"

namespace storyeval {

/// Splits on whitespace, then peels leading and trailing ASCII punctuation
/// off each chunk as one-character tokens. "Hello, world!" gives
/// [Hello] [,] [world] [!].
std::vector<std::string> tokenize_words(std::string_view text);

/// Sentence ends after a token in {".", "!", "?"}, plus any closing quote
/// tokens that immediately follow it. A straight double quote counts as
/// closing only while a quote is open. Any remainder is a final sentence.
std::vector<SentenceRange> split_sentences(std::span<const std::string> tokens);

using Ngram = std::vector<std::string>;

/// Multiset of contiguous n-grams; total counts occurrences.
struct NgramSet {
  std::size_t order = 1;
  std::map<Ngram, std::size_t> counts;
  std::size_t total = 0;

  std::size_t unique() const { return counts.size(); }
  bool contains(const Ngram& g) const { return counts.count(g) != 0; }
};

/// Throws std::invalid_argument when n < 1.
NgramSet extract_ngrams(std::span<const std::string> tokens, std::size_t n);

std::string to_lower(std::string_view s);
std::string join(std::span<const std::string> tokens, std::string_view sep = " ");

}  // namespace storyeval
