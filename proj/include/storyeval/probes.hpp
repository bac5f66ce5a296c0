#pragma once

// Model probes: prompt ranking, adjacent-sentence swap coherence,
// confidence over story position, story log probability and word-level
// perplexity. Each probe runs either against a live LmScorer or against a
// table of precomputed candidate scores.

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "storyeval/schema.hpp"
#include "storyeval/scorer.hpp"

namespace storyeval {

/// How an exact tie between the reference candidate and a rival counts.
enum class TiePolicy {
  kStrict,   // a tie is a failure (swap error / ranking miss)
  kLenient,  // a tie goes to the reference candidate
};

std::optional<TiePolicy> parse_tie_policy(std::string_view name);
std::string_view to_string(TiePolicy policy);

/// Pure score per (context, target): ln of a uniform draw keyed by a hash of
/// the seed and both token sequences. The chance-level baseline.
class UniformRandomScorer final : public LmScorer {
 public:
  explicit UniformRandomScorer(std::uint64_t seed, std::size_t vocab = 2);

  double score_sequence(std::span<const std::string> context,
                        std::span<const std::string> target) const override;
  std::vector<double> next_dist(std::span<const std::string> context) const override;
  std::size_t vocab_size() const override { return names_.size(); }
  const std::string& token(TokenId id) const override { return names_.at(id); }

 private:
  std::uint64_t seed_;
  std::vector<std::string> names_;
};

/// Candidate scores computed offline, keyed "<id>#orig", "<id>#swap<i>",
/// "<id>#prompt<j>" (prompt0 is the true prompt).
class ScoreTable {
 public:
  ScoreTable() = default;
  explicit ScoreTable(std::map<std::string, double> scores) : scores_(std::move(scores)) {}

  /// One "key score" pair per line, tab- or space-separated.
  static ScoreTable load(const std::string& path);

  std::optional<double> find(const std::string& key) const;
  void set(const std::string& key, double score) { scores_[key] = score; }
  std::size_t size() const { return scores_.size(); }

  static std::string orig_key(std::string_view id);
  static std::string swap_key(std::string_view id, std::size_t position);
  static std::string prompt_key(std::string_view id, std::size_t j);

 private:
  std::map<std::string, double> scores_;
};

// ---- prompt ranking ------------------------------------------------------

inline constexpr std::size_t kDistractorPrompts = 9;

bool ranking_success(double true_score, std::span<const double> distractors,
                     TiePolicy policy = TiePolicy::kStrict);

/// Distinct prompt token sequences of `records`, in first-seen order.
std::vector<std::vector<std::string>> collect_prompts(std::span<const EvalRecord> records);

/// Indices into `pool` of the distractors for story number `story_index`:
/// drawn without replacement from the pool minus the true prompt, with a
/// stream seeded by derive_seed(seed, story_index).
std::vector<std::size_t> sample_distractors(
    std::span<const std::vector<std::string>> pool,
    const std::vector<std::string>& true_prompt, std::uint64_t seed,
    std::size_t story_index, std::size_t count = kDistractorPrompts);

struct RankingResult {
  double accuracy = 0.0;
  std::size_t stories = 0;
  std::size_t successes = 0;
};

/// Throws std::invalid_argument when the pool holds fewer than ten distinct
/// prompts.
RankingResult prompt_ranking_accuracy(const LmScorer& scorer,
                                      std::span<const EvalRecord> stories,
                                      std::span<const std::vector<std::string>> prompts,
                                      std::uint64_t seed,
                                      TiePolicy policy = TiePolicy::kStrict,
                                      std::size_t workers = 1);

/// Offline variant reading "<id>#prompt0" .. "<id>#prompt9"; records with a
/// missing key are skipped.
RankingResult prompt_ranking_from_table(const ScoreTable& table,
                                        std::span<const EvalRecord> stories,
                                        TiePolicy policy = TiePolicy::kStrict);

// ---- swap probe ----------------------------------------------------------

inline constexpr std::size_t kSwapSentences = 15;
inline constexpr std::size_t kSwapPositions = kSwapSentences - 1;

struct SwapCandidates {
  std::vector<std::string> original;  // the first 15 sentences
  std::array<std::vector<std::string>, kSwapPositions> corrupted;  // [i-1] swaps i and i+1
};

/// nullopt when the record has fewer than 15 sentences.
std::optional<SwapCandidates> swap_candidates(const EvalRecord& rec);

struct SwapJudgement {
  bool error = false;
  std::array<std::size_t, kSwapPositions> rank{};  // rank of each swap position, 1 = most probable
};

SwapJudgement judge_swap(double original,
                         const std::array<double, kSwapPositions>& corrupted,
                         TiePolicy policy = TiePolicy::kStrict);

struct SwapResult {
  double error_rate = 0.0;
  std::array<double, kSwapPositions> mean_rank{};
  std::size_t evaluated = 0;
  std::size_t skipped = 0;
};

SwapResult swap_probe(const LmScorer& scorer, std::span<const EvalRecord> records,
                      TiePolicy policy = TiePolicy::kStrict, std::size_t workers = 1);

SwapResult swap_probe_from_table(const ScoreTable& table,
                                 std::span<const EvalRecord> records,
                                 TiePolicy policy = TiePolicy::kStrict);

// ---- confidence and log probability --------------------------------------

/// exp of the summed subword log probs of each word, for words 0..horizon-1;
/// nullopt if some word below the horizon has no subword in the trace.
std::optional<std::vector<double>> word_probabilities(const TokenTrace& trace,
                                                      std::size_t horizon);

struct ConfidenceCurve {
  std::vector<double> mean_prob;  // index t = word position t+1
  std::size_t used = 0;
  std::size_t excluded = 0;
};

/// Mean word probability per position over the traces that cover the
/// horizon. Throws std::invalid_argument if none do.
ConfidenceCurve confidence_curve(std::span<const TokenTrace> traces,
                                 std::size_t horizon = kHumanStoryWords);

/// Sum of subword log probs. Throws std::invalid_argument on an empty trace.
double story_logprob(const TokenTrace& trace);

/// exp(-sum logp / words) over the whole corpus, where `word_counts[i]` is
/// the number of word-level tokens covered by traces[i].
double word_perplexity(std::span<const TokenTrace> traces,
                       std::span<const std::size_t> word_counts);

/// Same, counting each record's word tokens. Records without a trace are
/// an error.
double word_perplexity(std::span<const EvalRecord> records);

struct ProbeResult {
  std::optional<RankingResult> ranking;
  std::optional<SwapResult> swap;
  std::optional<ConfidenceCurve> confidence;
  std::optional<double> story_logprob_mean;
  std::optional<double> word_perplexity;
};

}  // namespace storyeval
