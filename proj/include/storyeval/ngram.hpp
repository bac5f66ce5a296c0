#pragma once

// Reference n-gram language model with interpolated absolute discounting.
//
//   P(w | h) = max(c(h,w) - D, 0) / c(h) + D * N1+(h .) / c(h) * P(w | h')
//
// where h' drops the oldest word of h. Contexts never seen in training fall
// straight through to h'. The recursion ends at a discounted unigram
// interpolated with the uniform distribution over every predictable token:
//
//   P(w) = max(c(w) - D, 0) / N + D * T / N / |V'|
//
// with T the number of seen types and V' the vocabulary minus <s>.

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "storyeval/schema.hpp"
#include "storyeval/scorer.hpp"

namespace storyeval {

class NgramModel final : public LmScorer {
 public:
  static constexpr TokenId kBos = 0;
  static constexpr TokenId kEos = 1;
  static constexpr TokenId kUnk = 2;
  static constexpr double kDefaultDiscount = 0.75;
  static constexpr std::uint32_t kFormatVersion = 1;

  /// Each document is padded with order-1 <s> and terminated by </s>.
  /// Throws std::invalid_argument on an empty corpus, order < 1 or a
  /// discount outside (0, 1].
  static NgramModel train(std::span<const std::vector<std::string>> documents,
                          std::size_t order = 3,
                          double discount = kDefaultDiscount);

  static NgramModel load(const std::string& path);
  void save(const std::string& path) const;

  std::size_t order() const { return order_; }
  double discount() const { return discount_; }

  TokenId id_of(std::string_view word) const;

  /// P(w | context); only the last order-1 ids of the context matter and a
  /// short context is left-padded with <s>.
  double prob(std::span<const TokenId> context, TokenId w) const;
  std::vector<double> distribution(std::span<const TokenId> context) const;

  /// Teacher-forced trace: one entry per target word.
  TokenTrace teacher_force(std::span<const std::string> context,
                           std::span<const std::string> target) const;

  /// All contexts with at least one observation, for invariant checks.
  std::vector<std::vector<TokenId>> contexts() const;

  double score_sequence(std::span<const std::string> context,
                        std::span<const std::string> target) const override;
  std::vector<double> next_dist(std::span<const std::string> context) const override;
  std::size_t vocab_size() const override { return vocab_.size(); }
  const std::string& token(TokenId id) const override { return vocab_.at(id); }
  std::vector<TokenId> non_word_tokens() const override { return {kBos, kEos, kUnk}; }

  friend bool operator==(const NgramModel& a, const NgramModel& b);

 private:
  struct ContextStats {
    std::uint64_t total = 0;
    std::vector<std::pair<TokenId, std::uint64_t>> followers;  // sorted by id
  };

  NgramModel() = default;
  void finalize();
  std::vector<TokenId> padded_ids(std::span<const std::string> context) const;
  const ContextStats* find_context(std::span<const TokenId> ctx) const;
  static std::string key_of(std::span<const TokenId> ctx);

  std::size_t order_ = 3;
  double discount_ = kDefaultDiscount;
  std::vector<std::string> vocab_;
  std::unordered_map<std::string, TokenId> index_;
  // levels_[m] maps an m-word context to its follower counts; m = 0 is the
  // unigram level with the empty context.
  std::vector<std::unordered_map<std::string, ContextStats>> levels_;
  std::vector<double> unigram_;
};

}  // namespace storyeval
