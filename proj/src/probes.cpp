#include "storyeval/probes.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include "storyeval/hash.hpp"
#include "storyeval/parallel.hpp"
#include "storyeval/rng.hpp"

namespace storyeval {

std::optional<TiePolicy> parse_tie_policy(std::string_view name) {
  if (name == "strict") return TiePolicy::kStrict;
  if (name == "lenient") return TiePolicy::kLenient;
  return std::nullopt;
}

std::string_view to_string(TiePolicy policy) {
  return policy == TiePolicy::kStrict ? "strict" : "lenient";
}

UniformRandomScorer::UniformRandomScorer(std::uint64_t seed, std::size_t vocab)
    : seed_(seed) {
  if (vocab < 1) throw std::invalid_argument("vocabulary must be nonempty");
  for (std::size_t i = 0; i < vocab; ++i) names_.push_back("r" + std::to_string(i));
}

double UniformRandomScorer::score_sequence(std::span<const std::string> context,
                                           std::span<const std::string> target) const {
  if (target.empty()) return 0.0;
  std::uint64_t h = fnv1a(hex64(seed_));
  for (const auto& t : context) h = fnv1a(t + '\x1f', h);
  h = fnv1a("\x1e", h);
  for (const auto& t : target) h = fnv1a(t + '\x1f', h);
  SplitMix64 rng(h);
  return std::log1p(-rng.uniform());
}

std::vector<double> UniformRandomScorer::next_dist(std::span<const std::string>) const {
  return std::vector<double>(names_.size(), 1.0 / static_cast<double>(names_.size()));
}

ScoreTable ScoreTable::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open score table: " + path);
  std::map<std::string, double> scores;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    const auto sep = line.find_last_of(" \t");
    if (sep == std::string::npos || sep == 0) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": expected 'key score'");
    }
    auto key_end = line.find_last_not_of(" \t", sep);
    const std::string key = line.substr(0, key_end + 1);
    const std::string num = line.substr(sep + 1);
    double v = 0;
    auto [ptr, ec] = std::from_chars(num.data(), num.data() + num.size(), v);
    if (ec != std::errc() || ptr != num.data() + num.size()) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": bad score");
    }
    scores[key] = v;
  }
  return ScoreTable(std::move(scores));
}

std::optional<double> ScoreTable::find(const std::string& key) const {
  auto it = scores_.find(key);
  if (it == scores_.end()) return std::nullopt;
  return it->second;
}

std::string ScoreTable::orig_key(std::string_view id) {
  return std::string(id) + "#orig";
}

std::string ScoreTable::swap_key(std::string_view id, std::size_t position) {
  return std::string(id) + "#swap" + std::to_string(position);
}

std::string ScoreTable::prompt_key(std::string_view id, std::size_t j) {
  return std::string(id) + "#prompt" + std::to_string(j);
}

// ---- prompt ranking ------------------------------------------------------

bool ranking_success(double true_score, std::span<const double> distractors,
                     TiePolicy policy) {
  for (double d : distractors) {
    if (policy == TiePolicy::kStrict ? d >= true_score : d > true_score) return false;
  }
  return true;
}

std::vector<std::vector<std::string>> collect_prompts(std::span<const EvalRecord> records) {
  std::vector<std::vector<std::string>> out;
  for (const auto& r : records) {
    auto p = prompt_tokens_of(r);
    if (std::find(out.begin(), out.end(), p) == out.end()) out.push_back(std::move(p));
  }
  return out;
}

std::vector<std::size_t> sample_distractors(std::span<const std::vector<std::string>> pool,
                                            const std::vector<std::string>& true_prompt,
                                            std::uint64_t seed, std::size_t story_index,
                                            std::size_t count) {
  std::vector<std::size_t> candidates;
  for (std::size_t i = 0; i < pool.size(); ++i) {
    if (pool[i] != true_prompt) candidates.push_back(i);
  }
  if (candidates.size() < count) {
    throw std::invalid_argument("not enough distinct distractor prompts");
  }
  // Partial Fisher-Yates: the first `count` slots are the sample.
  SplitMix64 rng(derive_seed(seed, story_index));
  for (std::size_t i = 0; i < count; ++i) {
    const auto j = i + rng.below(candidates.size() - i);
    std::swap(candidates[i], candidates[j]);
  }
  candidates.resize(count);
  return candidates;
}

RankingResult prompt_ranking_accuracy(const LmScorer& scorer,
                                      std::span<const EvalRecord> stories,
                                      std::span<const std::vector<std::string>> prompts,
                                      std::uint64_t seed, TiePolicy policy,
                                      std::size_t workers) {
  std::vector<std::vector<std::string>> distinct;
  for (const auto& p : prompts) {
    if (std::find(distinct.begin(), distinct.end(), p) == distinct.end()) distinct.push_back(p);
  }
  if (distinct.size() < kDistractorPrompts + 1) {
    throw std::invalid_argument("prompt ranking needs at least 10 distinct prompts");
  }

  std::vector<char> success(stories.size(), 0);
  parallel_for(stories.size(), workers, [&](std::size_t i) {
    const auto& story = stories[i];
    const auto truth = prompt_tokens_of(story);
    const double true_score = scorer.score_sequence(truth, story.tokens);
    std::array<double, kDistractorPrompts> rival{};
    const auto picks = sample_distractors(distinct, truth, seed, i);
    for (std::size_t j = 0; j < picks.size(); ++j) {
      rival[j] = scorer.score_sequence(distinct[picks[j]], story.tokens);
    }
    success[i] = ranking_success(true_score, rival, policy) ? 1 : 0;
  });

  RankingResult r;
  r.stories = stories.size();
  r.successes = static_cast<std::size_t>(std::count(success.begin(), success.end(), 1));
  r.accuracy = r.stories ? static_cast<double>(r.successes) / static_cast<double>(r.stories) : 0.0;
  return r;
}

RankingResult prompt_ranking_from_table(const ScoreTable& table,
                                        std::span<const EvalRecord> stories,
                                        TiePolicy policy) {
  RankingResult r;
  for (const auto& story : stories) {
    auto truth = table.find(ScoreTable::prompt_key(story.id, 0));
    if (!truth) continue;
    std::vector<double> rival;
    for (std::size_t j = 1; j <= kDistractorPrompts; ++j) {
      auto s = table.find(ScoreTable::prompt_key(story.id, j));
      if (!s) break;
      rival.push_back(*s);
    }
    if (rival.size() != kDistractorPrompts) continue;
    ++r.stories;
    if (ranking_success(*truth, rival, policy)) ++r.successes;
  }
  r.accuracy = r.stories ? static_cast<double>(r.successes) / static_cast<double>(r.stories) : 0.0;
  return r;
}

// ---- swap probe ----------------------------------------------------------

std::optional<SwapCandidates> swap_candidates(const EvalRecord& rec) {
  if (rec.sent_bounds.size() < kSwapSentences) return std::nullopt;
  std::vector<std::span<const std::string>> sents;
  for (std::size_t s = 0; s < kSwapSentences; ++s) {
    const auto& r = rec.sent_bounds[s];
    sents.emplace_back(rec.tokens.data() + r.begin, r.size());
  }
  auto concat = [](const std::vector<std::span<const std::string>>& parts) {
    std::vector<std::string> out;
    for (const auto& p : parts) out.insert(out.end(), p.begin(), p.end());
    return out;
  };
  SwapCandidates c;
  c.original = concat(sents);
  for (std::size_t i = 0; i < kSwapPositions; ++i) {
    auto order = sents;
    std::swap(order[i], order[i + 1]);
    c.corrupted[i] = concat(order);
  }
  return c;
}

SwapJudgement judge_swap(double original,
                         const std::array<double, kSwapPositions>& corrupted,
                         TiePolicy policy) {
  SwapJudgement j;
  for (double c : corrupted) {
    if (policy == TiePolicy::kStrict ? c >= original : c > original) j.error = true;
  }
  std::array<std::size_t, kSwapPositions> order{};
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return corrupted[a] > corrupted[b];
  });
  for (std::size_t r = 0; r < order.size(); ++r) j.rank[order[r]] = r + 1;
  return j;
}

namespace {

SwapResult summarize(const std::vector<std::optional<SwapJudgement>>& judged) {
  SwapResult out;
  std::array<double, kSwapPositions> rank_sum{};
  std::size_t errors = 0;
  for (const auto& j : judged) {
    if (!j) {
      ++out.skipped;
      continue;
    }
    ++out.evaluated;
    errors += j->error ? 1 : 0;
    for (std::size_t p = 0; p < kSwapPositions; ++p) {
      rank_sum[p] += static_cast<double>(j->rank[p]);
    }
  }
  if (out.evaluated) {
    const auto n = static_cast<double>(out.evaluated);
    out.error_rate = static_cast<double>(errors) / n;
    for (std::size_t p = 0; p < kSwapPositions; ++p) out.mean_rank[p] = rank_sum[p] / n;
  }
  return out;
}

}  // namespace

SwapResult swap_probe(const LmScorer& scorer, std::span<const EvalRecord> records,
                      TiePolicy policy, std::size_t workers) {
  std::vector<std::optional<SwapJudgement>> judged(records.size());
  parallel_for(records.size(), workers, [&](std::size_t i) {
    auto cands = swap_candidates(records[i]);
    if (!cands) return;
    const auto prompt = prompt_tokens_of(records[i]);
    const double orig = scorer.score_sequence(prompt, cands->original);
    std::array<double, kSwapPositions> corrupted{};
    for (std::size_t p = 0; p < kSwapPositions; ++p) {
      corrupted[p] = scorer.score_sequence(prompt, cands->corrupted[p]);
    }
    judged[i] = judge_swap(orig, corrupted, policy);
  });
  return summarize(judged);
}

SwapResult swap_probe_from_table(const ScoreTable& table,
                                 std::span<const EvalRecord> records,
                                 TiePolicy policy) {
  std::vector<std::optional<SwapJudgement>> judged(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& id = records[i].id;
    auto orig = table.find(ScoreTable::orig_key(id));
    if (!orig) continue;
    std::array<double, kSwapPositions> corrupted{};
    bool complete = true;
    for (std::size_t p = 0; p < kSwapPositions && complete; ++p) {
      auto s = table.find(ScoreTable::swap_key(id, p + 1));
      complete = s.has_value();
      if (s) corrupted[p] = *s;
    }
    if (complete) judged[i] = judge_swap(*orig, corrupted, policy);
  }
  return summarize(judged);
}

// ---- confidence and log probability --------------------------------------

std::optional<std::vector<double>> word_probabilities(const TokenTrace& trace,
                                                      std::size_t horizon) {
  std::vector<double> logp(horizon, 0.0);
  std::vector<char> seen(horizon, 0);
  for (std::size_t i = 0; i < trace.word_ix.size(); ++i) {
    const auto w = trace.word_ix[i];
    if (w >= horizon) break;
    logp[w] += trace.sub_logp[i];
    seen[w] = 1;
  }
  if (std::find(seen.begin(), seen.end(), 0) != seen.end()) return std::nullopt;
  for (double& x : logp) x = std::exp(x);
  return logp;
}

ConfidenceCurve confidence_curve(std::span<const TokenTrace> traces, std::size_t horizon) {
  ConfidenceCurve c;
  c.mean_prob.assign(horizon, 0.0);
  for (const auto& t : traces) {
    auto probs = word_probabilities(t, horizon);
    if (!probs) {
      ++c.excluded;
      continue;
    }
    ++c.used;
    for (std::size_t i = 0; i < horizon; ++i) c.mean_prob[i] += (*probs)[i];
  }
  if (c.used == 0) throw std::invalid_argument("no trace covers the confidence horizon");
  for (double& x : c.mean_prob) x /= static_cast<double>(c.used);
  return c;
}

double story_logprob(const TokenTrace& trace) {
  if (trace.sub_logp.empty()) throw std::invalid_argument("empty trace");
  return std::accumulate(trace.sub_logp.begin(), trace.sub_logp.end(), 0.0);
}

double word_perplexity(std::span<const TokenTrace> traces,
                       std::span<const std::size_t> word_counts) {
  if (traces.size() != word_counts.size()) {
    throw std::invalid_argument("one word count per trace is required");
  }
  double nll = 0.0;
  std::size_t words = 0;
  for (std::size_t i = 0; i < traces.size(); ++i) {
    nll -= story_logprob(traces[i]);
    words += word_counts[i];
  }
  if (words == 0) throw std::invalid_argument("perplexity over zero words");
  return std::exp(nll / static_cast<double>(words));
}

double word_perplexity(std::span<const EvalRecord> records) {
  std::vector<TokenTrace> traces;
  std::vector<std::size_t> counts;
  for (const auto& r : records) {
    if (!r.trace) throw std::invalid_argument("record " + r.id + " has no trace");
    traces.push_back(*r.trace);
    counts.push_back(r.tokens.size());
  }
  return word_perplexity(traces, counts);
}

}  // namespace storyeval
