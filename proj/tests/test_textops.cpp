#include <doctest.h>

#include <random>
#include <regex>
#include <sstream>

#include "oracle.hpp"
#include "storyeval/textops.hpp"

using namespace storyeval;
using Tokens = std::vector<std::string>;

namespace {

// Same rule, written with a regex over whitespace chunks.
Tokens regex_tokenize(const std::string& text) {
  static const std::regex chunk_re(R"(^([[:punct:]]*)(.*?)([[:punct:]]*)$)");
  Tokens out;
  std::istringstream in(text);
  std::string chunk;
  while (in >> chunk) {
    std::smatch m;
    std::regex_match(chunk, m, chunk_re);
    for (char c : m[1].str()) out.emplace_back(1, c);
    if (m[2].length() > 0) out.push_back(m[2].str());
    for (char c : m[3].str()) out.emplace_back(1, c);
  }
  return out;
}

}  // namespace

TEST_CASE("tokenize_words examples") {
  CHECK(tokenize_words("Hello, world!") == Tokens{"Hello", ",", "world", "!"});
  CHECK(tokenize_words("").empty());
  CHECK(tokenize_words("   \t\n ").empty());
  CHECK(tokenize_words("\"Stop!\" she said...") ==
        Tokens{"\"", "Stop", "!", "\"", "she", "said", ".", ".", "."});
  CHECK(tokenize_words("don't ...") == Tokens{"don't", ".", ".", "."});
  CHECK(tokenize_words("caf\xc3\xa9.") == Tokens{"caf\xc3\xa9", "."});
}

TEST_CASE("1k-char paragraph matches an independent regex tokenizer") {
  std::mt19937_64 gen(42);
  const std::vector<std::string> pieces = {"the",  "Queen", "of",     "England", "\"",    "'",
                                           ",",    ".",     "!",      "?",       "(wow)", "--",
                                           "x-ray", "it's", "\xc3\xa9t\xc3\xa9", "[1]", "...", ";"};
  std::string text;
  while (text.size() < 1000) {
    const auto& p = pieces[gen() % pieces.size()];
    text += p;
    const auto sep = gen() % 4;
    text += sep == 0 ? "" : sep == 1 ? "  " : sep == 2 ? "\n" : " ";
  }
  CHECK(tokenize_words(text) == regex_tokenize(text));
  for (int trial = 0; trial < 200; ++trial) {
    std::string t;
    for (int i = 0; i < 30; ++i) {
      t += pieces[gen() % pieces.size()];
      if (gen() % 2) t += ' ';
    }
    CHECK(tokenize_words(t) == regex_tokenize(t));
  }
}

TEST_CASE("split_sentences examples") {
  CHECK(split_sentences(Tokens{"I", ".", "You", "?"}) ==
        std::vector<SentenceRange>{{0, 2}, {2, 4}});
  CHECK(split_sentences(Tokens{"no", "end", "here"}) == std::vector<SentenceRange>{{0, 3}});
  CHECK(split_sentences(Tokens{}).empty());
  CHECK(split_sentences(Tokens{"a", ".", "b"}) == std::vector<SentenceRange>{{0, 2}, {2, 3}});
}

TEST_CASE("quoted dialogue splits as hand-annotated") {
  // "Run!" she cried. "Where?" He looked around. Then silence
  const auto toks = tokenize_words(
      "\"Run!\" she cried. \"Where?\" He looked around. Then silence");
  REQUIRE(toks == Tokens{"\"", "Run", "!", "\"", "she", "cried", ".", "\"", "Where", "?", "\"",
                         "He", "looked", "around", ".", "Then", "silence"});
  CHECK(split_sentences(toks) ==
        std::vector<SentenceRange>{{0, 4}, {4, 7}, {7, 11}, {11, 15}, {15, 17}});
}

TEST_CASE("extract_ngrams examples") {
  const auto s = extract_ngrams(Tokens{"a", "b", "a"}, 2);
  CHECK(s.total == 2);
  CHECK(s.unique() == 2);
  CHECK(s.counts.at({"a", "b"}) == 1);
  CHECK(s.counts.at({"b", "a"}) == 1);

  const auto e = extract_ngrams(Tokens{"a", "b"}, 3);
  CHECK(e.total == 0);
  CHECK(e.counts.empty());
  CHECK_THROWS_AS(extract_ngrams(Tokens{"a"}, 0), std::invalid_argument);
}

TEST_CASE("150-token fixture: trigram counts equal brute-force enumeration") {
  std::mt19937_64 gen(7);
  Tokens toks;
  for (int i = 0; i < 150; ++i) toks.push_back(std::string(1, static_cast<char>('a' + gen() % 4)));
  const auto set = extract_ngrams(toks, 3);
  const auto grams = oracle::ngrams(toks, 3);
  CHECK(set.total == grams.size());
  std::size_t sum = 0;
  for (const auto& [g, c] : set.counts) {
    std::size_t brute = 0;
    for (const auto& h : grams) brute += (h == g);
    CHECK(c == brute);
    sum += c;
  }
  CHECK(sum == set.total);
}

TEST_CASE("property: ngram totals and sentence partitions") {
  std::mt19937_64 gen(17);
  const Tokens alphabet = {"a", "b", ".", "?", "\"", "!", "c"};
  for (int trial = 0; trial < 500; ++trial) {
    Tokens toks;
    const auto len = gen() % 40;
    for (std::size_t i = 0; i < len; ++i) toks.push_back(alphabet[gen() % alphabet.size()]);
    for (std::size_t n = 1; n <= 4; ++n) {
      const auto s = extract_ngrams(toks, n);
      CHECK(s.total == (toks.size() >= n ? toks.size() - n + 1 : 0));
      std::size_t sum = 0;
      for (const auto& [g, c] : s.counts) sum += c;
      CHECK(sum == s.total);
    }
    const auto bounds = split_sentences(toks);
    std::size_t cursor = 0;
    for (const auto& b : bounds) {
      CHECK(b.begin == cursor);
      CHECK(b.end > b.begin);
      cursor = b.end;
    }
    CHECK(cursor == toks.size());
  }
}
