#include "storyeval/intrinsic.hpp"

#include <cmath>

#include "storyeval/textops.hpp"

namespace storyeval {

std::optional<double> distinct_n(std::span<const std::string> tokens, std::size_t n) {
  const auto set = extract_ngrams(tokens, n);
  if (set.total == 0) return std::nullopt;
  return static_cast<double>(set.unique()) / static_cast<double>(set.total);
}

std::optional<double> mean_log_unigram_prob(std::span<const std::string> tokens,
                                            const UnigramTable& unigrams) {
  if (tokens.empty()) return std::nullopt;
  double sum = 0.0;
  for (const auto& t : tokens) sum += std::log(unigrams.prob(t));
  return sum / static_cast<double>(tokens.size());
}

std::optional<double> stopword_fraction(std::span<const std::string> tokens,
                                        const StopwordList& stops) {
  if (tokens.empty()) return std::nullopt;
  std::size_t hits = 0;
  for (const auto& t : tokens) hits += stops.contains_lower(to_lower(t)) ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(tokens.size());
}

double mean_sentence_length(const EvalRecord& rec) {
  if (rec.sent_bounds.empty()) return 0.0;
  std::size_t total = 0;
  for (const auto& r : rec.sent_bounds) total += r.size();
  return static_cast<double>(total) / static_cast<double>(rec.sent_bounds.size());
}

std::vector<std::string> pos_sequence(const EvalRecord& rec) {
  std::vector<std::string> tags;
  if (!rec.annotations) return tags;
  tags.reserve(rec.annotations->size());
  for (const auto& a : *rec.annotations) tags.emplace_back(to_string(a.pos));
  return tags;
}

std::optional<std::map<Upos, double>> pos_distribution(const EvalRecord& rec) {
  if (!rec.annotations || rec.annotations->empty()) return std::nullopt;
  std::map<Upos, double> dist;
  for (const auto& a : *rec.annotations) dist[a.pos] += 1.0;
  const auto n = static_cast<double>(rec.annotations->size());
  for (auto& [tag, v] : dist) v /= n;
  return dist;
}

std::optional<double> pos_distinct_n(const EvalRecord& rec, std::size_t n) {
  if (!rec.annotations) return std::nullopt;
  return distinct_n(pos_sequence(rec), n);
}

std::optional<double> mean_concreteness(const EvalRecord& rec,
                                        const ConcretenessLexicon& lexicon,
                                        PosClass cls, ConcretenessOptions opts) {
  if (!rec.annotations) return std::nullopt;
  auto wanted = [&](Upos p) {
    if (cls == PosClass::kNoun) {
      return p == Upos::NOUN || (opts.include_propn && p == Upos::PROPN);
    }
    return p == Upos::VERB || (opts.include_aux && p == Upos::AUX);
  };
  double sum = 0.0;
  std::size_t matched = 0;
  for (const auto& a : *rec.annotations) {
    if (!wanted(a.pos)) continue;
    if (auto r = lexicon.rating(a.lemma)) {
      sum += *r;
      ++matched;
    }
  }
  if (matched == 0) return std::nullopt;
  return sum / static_cast<double>(matched);
}

IntrinsicMetrics compute_intrinsic(const EvalRecord& rec, const Resources& res,
                                   ConcretenessOptions opts) {
  IntrinsicMetrics m;
  for (std::size_t n = 1; n <= 3; ++n) {
    m.distinct[n - 1] = distinct_n(rec.tokens, n);
    m.pos_distinct[n - 1] = pos_distinct_n(rec, n);
  }
  if (res.unigrams) m.mean_log_unigram = mean_log_unigram_prob(rec.tokens, *res.unigrams);
  if (res.stopwords) m.stopword_frac = stopword_fraction(rec.tokens, *res.stopwords);
  m.mean_sent_len = mean_sentence_length(rec);
  m.pos_dist = pos_distribution(rec);
  if (res.concreteness) {
    m.noun_concreteness = mean_concreteness(rec, *res.concreteness, PosClass::kNoun, opts);
    m.verb_concreteness = mean_concreteness(rec, *res.concreteness, PosClass::kVerb, opts);
  }
  return m;
}

}  // namespace storyeval
