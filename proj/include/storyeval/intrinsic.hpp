#pragma once

// Per-story metrics that need no prompt: lexical diversity, word rareness,
// stopword rate, sentence length, part-of-speech statistics, concreteness.

#include <array>
#include <map>
#include <optional>
#include <span>
#include <string>

#include "storyeval/resources.hpp"
#include "storyeval/schema.hpp"

namespace storyeval {

/// Unique n-grams over total n-grams; nullopt when the text has no n-gram.
std::optional<double> distinct_n(std::span<const std::string> tokens, std::size_t n);

/// Mean of ln p(w); out-of-vocabulary words get the table's floor.
std::optional<double> mean_log_unigram_prob(std::span<const std::string> tokens,
                                            const UnigramTable& unigrams);

/// Share of tokens whose lowercased form is a stopword.
std::optional<double> stopword_fraction(std::span<const std::string> tokens,
                                        const StopwordList& stops);

/// Mean sentence length in tokens; 0 for an empty record.
double mean_sentence_length(const EvalRecord& rec);

std::vector<std::string> pos_sequence(const EvalRecord& rec);
std::optional<std::map<Upos, double>> pos_distribution(const EvalRecord& rec);
std::optional<double> pos_distinct_n(const EvalRecord& rec, std::size_t n);

enum class PosClass { kNoun, kVerb };

struct ConcretenessOptions {
  bool include_propn = false;  // count PROPN with nouns
  bool include_aux = false;    // count AUX with verbs
};

/// Mean rating over tokens of the given class whose lemma is rated.
std::optional<double> mean_concreteness(const EvalRecord& rec,
                                        const ConcretenessLexicon& lexicon,
                                        PosClass cls,
                                        ConcretenessOptions opts = {});

struct IntrinsicMetrics {
  std::array<std::optional<double>, 3> distinct;  // n = 1, 2, 3
  std::optional<double> mean_log_unigram;
  std::optional<double> stopword_frac;
  double mean_sent_len = 0.0;
  std::optional<std::map<Upos, double>> pos_dist;
  std::array<std::optional<double>, 3> pos_distinct;
  std::optional<double> noun_concreteness;
  std::optional<double> verb_concreteness;
};

IntrinsicMetrics compute_intrinsic(const EvalRecord& rec, const Resources& res,
                                   ConcretenessOptions opts = {});

}  // namespace storyeval
