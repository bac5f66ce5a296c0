#include <doctest.h>

#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "oracle.hpp"
#include "storyeval/intrinsic.hpp"

using namespace storyeval;
using Tokens = std::vector<std::string>;

namespace {

EvalRecord tagged(const std::vector<std::tuple<std::string, std::string, Upos>>& toks) {
  EvalRecord r;
  r.id = "t";
  r.model = "human";
  std::vector<AnnotatedToken> annos;
  for (const auto& [surface, lemma, pos] : toks) {
    r.tokens.push_back(surface);
    annos.push_back({surface, lemma, pos, "O"});
  }
  r.annotations = annos;
  r.sent_bounds = {{0, r.tokens.size()}};
  return r;
}

ConcretenessLexicon paper_lexicon() {
  return ConcretenessLexicon({{"television", 4.83}, {"darkness", 3.85}, {"idea", 1.61},
                              {"talk", 4.07},       {"see", 3.21},      {"hope", 1.25}});
}

}  // namespace

TEST_CASE("distinct-n") {
  CHECK(*distinct_n(Tokens{"a", "a", "b"}, 1) == doctest::Approx(2.0 / 3.0));
  CHECK_FALSE(distinct_n(Tokens{"a", "b"}, 3).has_value());
  CHECK_FALSE(distinct_n(Tokens{}, 1).has_value());
  CHECK(*distinct_n(Tokens{"a", "b", "c", "d"}, 2) == 1.0);
  CHECK(*distinct_n(Tokens{"x", "x", "x", "x"}, 2) == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("property: distinct-n extremes and duplication") {
  std::mt19937_64 gen(2);
  for (int trial = 0; trial < 300; ++trial) {
    Tokens t;
    const auto len = 1 + gen() % 30;
    for (std::size_t i = 0; i < len; ++i) t.push_back(std::string(1, static_cast<char>('a' + gen() % 5)));
    for (std::size_t n = 1; n <= 3; ++n) {
      const auto d = distinct_n(t, n);
      if (!d) continue;
      const auto set = extract_ngrams(t, n);
      CHECK((*d == 1.0) == (set.unique() == set.total));
      CHECK((*d == doctest::Approx(1.0 / static_cast<double>(set.total))) == (set.unique() == 1));
    }
    Tokens twice = t;
    twice.insert(twice.end(), t.begin(), t.end());
    CHECK(*distinct_n(twice, 1) <= *distinct_n(t, 1));
  }
}

TEST_CASE("mean log unigram probability") {
  const UnigramTable table({{"the", 0.5}}, 100);
  CHECK(*mean_log_unigram_prob(Tokens{"the", "the"}, table) == doctest::Approx(std::log(0.5)));
  CHECK(*mean_log_unigram_prob(Tokens{"zz", "qq"}, table) ==
        doctest::Approx(std::log(1.0 / 101.0)));
  CHECK_FALSE(mean_log_unigram_prob(Tokens{}, table).has_value());
}

TEST_CASE("stopword fraction") {
  const StopwordList stops({"the"});
  CHECK(*stopword_fraction(Tokens{"The", "cat", "sat"}, stops) == doctest::Approx(1.0 / 3.0));
  CHECK(*stopword_fraction(Tokens{"The", "cat"}, StopwordList{}) == 0.0);
  CHECK_FALSE(stopword_fraction(Tokens{}, stops).has_value());
}

TEST_CASE("mean sentence length") {
  EvalRecord r;
  r.tokens = Tokens(5, "w");
  r.sent_bounds = {{0, 3}, {3, 5}};
  CHECK(mean_sentence_length(r) == 2.5);
  r.tokens = Tokens(150, "w");
  r.sent_bounds = {{0, 150}};
  CHECK(mean_sentence_length(r) == 150.0);
  // hand count on a dialogue fixture: 4, 3, 4, 4, 2 tokens
  r.tokens = tokenize_words("\"Run!\" she cried. \"Where?\" He looked around. Then silence");
  r.sent_bounds = split_sentences(r.tokens);
  CHECK(mean_sentence_length(r) == doctest::Approx(17.0 / 5.0));
}

TEST_CASE("POS distribution and POS distinct-n") {
  auto r = tagged({{"I", "i", Upos::PRON}, {"run", "run", Upos::VERB}, {"home", "home", Upos::NOUN}});
  const auto dist = pos_distribution(r);
  REQUIRE(dist);
  CHECK(dist->at(Upos::PRON) == doctest::Approx(1.0 / 3.0));
  CHECK(dist->at(Upos::VERB) == doctest::Approx(1.0 / 3.0));
  CHECK(dist->at(Upos::NOUN) == doctest::Approx(1.0 / 3.0));
  CHECK(*pos_distinct_n(r, 1) == 1.0);

  std::vector<std::tuple<std::string, std::string, Upos>> pv;
  for (int i = 0; i < 10; ++i) {
    pv.emplace_back("we", "we", Upos::PRON);
    pv.emplace_back("go", "go", Upos::VERB);
  }
  CHECK(*pos_distinct_n(tagged(pv), 2) == doctest::Approx(2.0 / 19.0));

  r.annotations.reset();
  CHECK_FALSE(pos_distribution(r).has_value());
  CHECK_FALSE(pos_distinct_n(r, 1).has_value());
}

TEST_CASE("concreteness uses the paper's ratings") {
  const auto lex = paper_lexicon();
  auto r = tagged({{"The", "the", Upos::DET},
                   {"television", "television", Upos::NOUN},
                   {"gave", "give", Upos::VERB},
                   {"an", "a", Upos::DET},
                   {"idea", "idea", Upos::NOUN}});
  CHECK(*mean_concreteness(r, lex, PosClass::kNoun) == doctest::Approx(3.22));
  CHECK_FALSE(mean_concreteness(r, lex, PosClass::kVerb).has_value());

  auto h = tagged({{"We", "we", Upos::PRON}, {"hope", "hope", Upos::VERB}});
  CHECK(*mean_concreteness(h, lex, PosClass::kVerb) == doctest::Approx(1.25));

  auto none = tagged({{"table", "table", Upos::NOUN}});
  CHECK_FALSE(mean_concreteness(none, lex, PosClass::kNoun).has_value());
}

TEST_CASE("concreteness PROPN and AUX switches") {
  const auto lex = ConcretenessLexicon({{"paris", 4.0}, {"be", 2.0}, {"idea", 1.0}, {"see", 3.0}});
  auto r = tagged({{"Paris", "Paris", Upos::PROPN},
                   {"idea", "idea", Upos::NOUN},
                   {"was", "be", Upos::AUX},
                   {"seen", "see", Upos::VERB}});
  CHECK(*mean_concreteness(r, lex, PosClass::kNoun) == 1.0);
  CHECK(*mean_concreteness(r, lex, PosClass::kNoun, {true, false}) == 2.5);
  CHECK(*mean_concreteness(r, lex, PosClass::kVerb) == 3.0);
  CHECK(*mean_concreteness(r, lex, PosClass::kVerb, {false, true}) == 2.5);
}

TEST_CASE("property: POS distribution sums to one; concreteness within matched range") {
  std::mt19937_64 gen(21);
  const auto lex = ConcretenessLexicon({{"cat", 4.9}, {"idea", 1.61}, {"hope", 1.25}, {"ran", 4.0},
                                        {"the", 1.1}, {"dog", 4.8}, {"sat", 3.3}});
  for (int i = 0; i < 200; ++i) {
    const auto r = fixtures::random_record(gen, "p" + std::to_string(i), 4);
    const auto dist = pos_distribution(r);
    REQUIRE(dist);
    double s = 0;
    for (const auto& [tag, v] : *dist) s += v;
    CHECK(std::abs(s - 1.0) < 1e-9);
    for (auto cls : {PosClass::kNoun, PosClass::kVerb}) {
      const auto m = mean_concreteness(r, lex, cls);
      if (!m) continue;
      double lo = 5, hi = 1;
      for (std::size_t t = 0; t < r.tokens.size(); ++t) {
        const auto& a = (*r.annotations)[t];
        const bool in_class = cls == PosClass::kNoun ? a.pos == Upos::NOUN : a.pos == Upos::VERB;
        if (auto rating = lex.rating(a.lemma); in_class && rating) {
          lo = std::min(lo, *rating);
          hi = std::max(hi, *rating);
        }
      }
      CHECK(*m >= lo - 1e-12);
      CHECK(*m <= hi + 1e-12);
    }
  }
}

TEST_CASE("fixture story metrics match brute force") {
  std::mt19937_64 gen(8);
  const auto table = build_unigram_table(tokenize_words("the cat sat on the mat and the dog ran"));
  oracle::Unigrams ou;
  for (const auto& [w, p] : table.probs()) ou.probs.emplace_back(w, p);
  ou.total = static_cast<double>(table.total_tokens());
  const StopwordList stops({"the", "on", "and"});
  for (int i = 0; i < 50; ++i) {
    const auto r = fixtures::random_record(gen, "f" + std::to_string(i), 6);
    CHECK(std::abs(*mean_log_unigram_prob(r.tokens, table) -
                   *oracle::mean_log_unigram(r.tokens, ou)) < 1e-12);
    CHECK(*stopword_fraction(r.tokens, stops) ==
          *oracle::stopword_frac(r.tokens, {"the", "on", "and"}));
  }
}
