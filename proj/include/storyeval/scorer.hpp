#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace storyeval {

using TokenId = std::uint32_t;

/// A language model as the probes and the sampler see it. Implementations
/// must be pure given their arguments so calls can run on parallel workers.
class LmScorer {
 public:
  virtual ~LmScorer() = default;

  /// Total natural-log probability of `target` following `context`.
  /// An empty target scores 0.
  virtual double score_sequence(std::span<const std::string> context,
                                std::span<const std::string> target) const = 0;

  /// Next-token distribution over the fixed vocabulary; sums to 1.
  virtual std::vector<double> next_dist(
      std::span<const std::string> context) const = 0;

  virtual std::size_t vocab_size() const = 0;
  virtual const std::string& token(TokenId id) const = 0;

  /// Sentinels (begin/end of text, unknown word) that generation must not
  /// emit as words.
  virtual std::vector<TokenId> non_word_tokens() const { return {}; }
};

}  // namespace storyeval
