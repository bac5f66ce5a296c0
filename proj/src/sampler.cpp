#include "storyeval/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace storyeval {

Draw top_k_step(std::span<const double> dist, const SamplerConfig& cfg,
                SplitMix64& rng) {
  if (dist.empty()) throw std::invalid_argument("empty distribution");
  if (cfg.k < 1 || cfg.k > dist.size()) {
    throw std::invalid_argument("k must lie in [1, vocabulary size]");
  }
  if (!(cfg.temperature > 0.0)) throw std::invalid_argument("temperature must be positive");
  const double mass = std::accumulate(dist.begin(), dist.end(), 0.0);
  if (std::abs(mass - 1.0) > 1e-9) {
    throw std::invalid_argument("distribution does not sum to 1");
  }

  std::vector<double> w(dist.begin(), dist.end());
  for (TokenId b : cfg.banned) {
    if (b < w.size()) w[b] = 0.0;
  }
  if (cfg.temperature != 1.0) {
    for (double& x : w) {
      if (x > 0.0) x = std::exp(std::log(x) / cfg.temperature);
    }
  }

  std::vector<TokenId> live;
  live.reserve(w.size());
  for (TokenId i = 0; i < w.size(); ++i) {
    if (w[i] > 0.0) live.push_back(i);
  }
  if (live.empty()) throw std::invalid_argument("all probability mass is banned");

  auto before = [&](TokenId a, TokenId b) {
    return w[a] != w[b] ? w[a] > w[b] : a < b;
  };
  const std::size_t keep = std::min<std::size_t>(cfg.k, live.size());
  std::partial_sort(live.begin(), live.begin() + static_cast<std::ptrdiff_t>(keep),
                    live.end(), before);
  live.resize(keep);

  double total = 0.0;
  for (TokenId i : live) total += w[i];

  const double u = rng.uniform() * total;
  double cum = 0.0;
  TokenId chosen = live.back();
  for (TokenId i : live) {
    cum += w[i];
    if (u < cum) {
      chosen = i;
      break;
    }
  }
  return {chosen, w[chosen] / total};
}

Generation generate(const LmScorer& scorer, std::span<const std::string> prompt,
                    const SamplerConfig& cfg) {
  if (cfg.k < 1 || cfg.k > scorer.vocab_size()) {
    throw std::invalid_argument("k must lie in [1, vocabulary size]");
  }
  SamplerConfig step_cfg = cfg;
  for (TokenId t : scorer.non_word_tokens()) step_cfg.banned.push_back(t);

  SplitMix64 rng(cfg.seed);
  std::vector<std::string> history(prompt.begin(), prompt.end());
  Generation out;
  out.tokens.reserve(cfg.target_len);
  out.trace.vocab_size = scorer.vocab_size();
  for (std::size_t i = 0; i < cfg.target_len; ++i) {
    const auto dist = scorer.next_dist(history);
    const Draw d = top_k_step(dist, step_cfg, rng);
    const std::string& word = scorer.token(d.token);
    history.push_back(word);
    out.tokens.push_back(word);
    out.trace.sub_logp.push_back(std::log(d.prob));
    out.trace.word_ix.push_back(i);
  }
  return out;
}

}  // namespace storyeval
