#include "storyeval/textops.hpp"

#include <algorithm>
#include <stdexcept>

namespace storyeval {

namespace {

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v';
}

bool is_punct(char c) {
  const auto u = static_cast<unsigned char>(c);
  return u < 0x80 && ((u >= 0x21 && u <= 0x2f) || (u >= 0x3a && u <= 0x40) ||
                      (u >= 0x5b && u <= 0x60) || (u >= 0x7b && u <= 0x7e));
}

bool is_terminal(const std::string& t) {
  return t == "." || t == "!" || t == "?";
}

bool is_closing_quote(const std::string& t) {
  return t == "'" || t == "''" || t == "”" || t == "’";
}

}  // namespace

std::vector<std::string> tokenize_words(std::string_view text) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && is_space(text[i])) ++i;
    std::size_t j = i;
    while (j < text.size() && !is_space(text[j])) ++j;
    if (j == i) break;
    std::string_view chunk = text.substr(i, j - i);
    i = j;

    std::size_t lead = 0;
    while (lead < chunk.size() && is_punct(chunk[lead])) ++lead;
    if (lead == chunk.size()) {
      // all punctuation: one token per character
      for (char c : chunk) out.emplace_back(1, c);
      continue;
    }
    std::size_t trail = chunk.size();
    while (trail > lead && is_punct(chunk[trail - 1])) --trail;

    for (std::size_t p = 0; p < lead; ++p) out.emplace_back(1, chunk[p]);
    out.emplace_back(chunk.substr(lead, trail - lead));
    for (std::size_t p = trail; p < chunk.size(); ++p)
      out.emplace_back(1, chunk[p]);
  }
  return out;
}

std::vector<SentenceRange> split_sentences(
    std::span<const std::string> tokens) {
  std::vector<SentenceRange> out;
  std::size_t start = 0;
  std::size_t i = 0;
  bool in_quote = false;  // straight double quotes alternate open/close
  while (i < tokens.size()) {
    if (is_terminal(tokens[i])) {
      std::size_t end = i + 1;
      while (end < tokens.size()) {
        if (tokens[end] == "\"" && in_quote) {
          in_quote = false;
        } else if (!is_closing_quote(tokens[end])) {
          break;
        }
        ++end;
      }
      out.push_back({start, end});
      start = end;
      i = end;
    } else {
      if (tokens[i] == "\"") in_quote = !in_quote;
      ++i;
    }
  }
  if (start < tokens.size()) out.push_back({start, tokens.size()});
  return out;
}

NgramSet extract_ngrams(std::span<const std::string> tokens, std::size_t n) {
  if (n < 1) throw std::invalid_argument("n-gram order must be at least 1");
  NgramSet set;
  set.order = n;
  if (tokens.size() < n) return set;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
    Ngram g(tokens.begin() + static_cast<std::ptrdiff_t>(i),
            tokens.begin() + static_cast<std::ptrdiff_t>(i + n));
    ++set.counts[std::move(g)];
    ++set.total;
  }
  return set;
}

std::string to_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](char c) {
    return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
  });
  return out;
}

std::string join(std::span<const std::string> tokens, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out += sep;
    out += tokens[i];
  }
  return out;
}

}  // namespace storyeval
