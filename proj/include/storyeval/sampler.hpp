#pragma once

// Top-k sampling: ban, apply temperature, keep the k most probable tokens,
// renormalize, draw once.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "storyeval/rng.hpp"
#include "storyeval/schema.hpp"
#include "storyeval/scorer.hpp"

namespace storyeval {

struct SamplerConfig {
  std::uint64_t k = 1;  // k == vocabulary size is full sampling
  double temperature = 1.0;
  std::vector<TokenId> banned;
  std::size_t target_len = kHumanStoryWords;
  std::uint64_t seed = 0;
};

struct Draw {
  TokenId token = 0;
  double prob = 0.0;  // under the truncated, renormalized distribution
};

/// Banned tokens are zeroed before truncation, so they never take a top-k
/// slot. Ties at the k-th value go to the lower token id. Throws
/// std::invalid_argument if `dist` does not sum to 1 within 1e-9, k is out
/// of range, or every token with mass is banned.
Draw top_k_step(std::span<const double> dist, const SamplerConfig& cfg,
                SplitMix64& rng);

struct Generation {
  std::vector<std::string> tokens;
  TokenTrace trace;  // one entry per word: log prob of the chosen token
};

/// Samples exactly cfg.target_len words after `prompt`. The scorer's
/// sentinel tokens are added to the ban set, so generation runs through any
/// end-of-text point.
Generation generate(const LmScorer& scorer, std::span<const std::string> prompt,
                    const SamplerConfig& cfg);

}  // namespace storyeval
