#pragma once

// Prompt-conditioned metrics: n-gram overlap with the prompt, SIF sentence
// similarity between prompt and story, and prompt entity usage.

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "storyeval/resources.hpp"
#include "storyeval/schema.hpp"

namespace storyeval {

/// Share of story n-gram occurrences whose n-gram occurs in the prompt.
std::optional<double> ngram_overlap(std::span<const std::string> story,
                                    std::span<const std::string> prompt,
                                    std::size_t n);

/// Which sentences share one first-principal-component estimate.
enum class PcScope {
  kGroup,   // all prompt and story sentences of one (model, k) group
  kCorpus,  // every record in the run
  kRecord,  // each record on its own
};

std::string_view to_string(PcScope scope);
std::optional<PcScope> parse_pc_scope(std::string_view name);

struct SifConfig {
  double a = 1e-3;
  bool pc_removal = true;
  PcScope pc_scope = PcScope::kGroup;
};

using Vec = std::vector<double>;

/// (1/m) sum a/(a + p(w)) v_w over the m tokens that have a vector;
/// nullopt if none do.
std::optional<Vec> sif_embed(std::span<const std::string> sentence,
                             const EmbeddingTable& emb,
                             const UnigramTable& unigrams, double a);

struct PcRemoval {
  std::vector<Vec> residuals;
  Vec component;                // unit first right singular vector
  std::vector<bool> degenerate; // residual collapsed to (numerically) zero
};

/// v <- v - u u^T v with u the first right singular vector of the stacked
/// batch. Throws std::invalid_argument for fewer than two vectors.
PcRemoval remove_first_pc(const std::vector<Vec>& batch);

double cosine(const Vec& x, const Vec& y);

/// Mean cosine over all (prompt sentence, story sentence) pairs, computed
/// for every record of `batch` with one shared PC estimate. A record with
/// no usable pair gets nullopt.
std::vector<std::optional<double>> story_prompt_similarity(
    std::span<const EvalRecord> batch, const EmbeddingTable& emb,
    const UnigramTable& unigrams, const SifConfig& cfg);

std::optional<double> story_prompt_similarity(const EvalRecord& rec,
                                              const EmbeddingTable& emb,
                                              const UnigramTable& unigrams,
                                              const SifConfig& cfg);

/// Lowercase, collapse whitespace runs, trim.
std::string normalize_text(std::string_view s);

/// Normalized entity mention texts read off IOB tags.
std::vector<std::string> entity_mentions(const std::vector<AnnotatedToken>& annos);

struct EntityUsage {
  std::optional<double> rate;
  std::optional<std::size_t> unique_entities;
};

EntityUsage entity_usage(const EvalRecord& rec);

struct RelatednessMetrics {
  std::array<std::optional<double>, 3> overlap;  // n = 1, 2, 3
  std::optional<double> sent_similarity;
  std::optional<double> entity_usage_rate;
  std::optional<std::size_t> unique_entities;
};

/// Everything except sentence similarity, which needs the batch.
RelatednessMetrics compute_relatedness(const EvalRecord& rec);

}  // namespace storyeval
