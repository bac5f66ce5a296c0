// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any
// failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "oracle.hpp"
#include "storyeval/cli.hpp"
#include "storyeval/intrinsic.hpp"
#include "storyeval/probes.hpp"
#include "storyeval/relatedness.hpp"
#include "storyeval/report.hpp"
#include "storyeval/sampler.hpp"

using namespace storyeval;
using Tokens = std::vector<std::string>;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + what;
    }
  }
};

std::string fmt(double v, int prec = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", prec, v);
  return buf;
}

Outcome swap_random() {
  Outcome o;
  std::vector<EvalRecord> recs;
  for (int i = 0; i < 1000; ++i) recs.push_back(fixtures::swap_record("swap" + std::to_string(i)));
  const auto t0 = Clock::now();
  const auto res = swap_probe(UniformRandomScorer(20180924), recs);
  const double secs = seconds_since(t0);
  o.detail = "error " + fmt(res.error_rate) + ", " + fmt(secs, 2) + " s";
  o.require(std::abs(res.error_rate - 14.0 / 15.0) <= 0.02, "error rate outside 93.33% +- 2%");
  for (std::size_t i = 0; i < kSwapPositions; ++i) {
    o.require(std::abs(res.mean_rank[i] - 7.5) <= 0.3,
              "mean rank at position " + std::to_string(i + 1) + " is " + fmt(res.mean_rank[i]));
  }
  o.require(res.evaluated == 1000, "not every record evaluated");
  o.require(secs < 10.0, "slower than 10 s");
  return o;
}

Outcome ranking_random() {
  Outcome o;
  std::vector<EvalRecord> recs;
  std::mt19937_64 gen(5);
  for (int i = 0; i < 1000; ++i) {
    EvalRecord r;
    r.id = "rank" + std::to_string(i);
    r.model = "m";
    r.prompt_tokens = Tokens{"prompt", "number", std::to_string(i)};
    r.prompt_text = join(*r.prompt_tokens);
    for (int w = 0; w < 20; ++w) r.tokens.push_back(fixtures::small_vocab()[gen() % 12]);
    r.tokens.push_back(".");
    r.story_text = join(r.tokens);
    r.sent_bounds = split_sentences(r.tokens);
    recs.push_back(std::move(r));
  }
  const auto t0 = Clock::now();
  const auto res = prompt_ranking_accuracy(UniformRandomScorer(7), recs, collect_prompts(recs), 11);
  const double secs = seconds_since(t0);
  o.detail = "accuracy " + fmt(res.accuracy) + ", " + fmt(secs, 2) + " s";
  o.require(std::abs(res.accuracy - 0.10) <= 0.02, "accuracy outside 10% +- 2%");
  o.require(res.stories == 1000, "not every story ranked");
  o.require(secs < 10.0, "slower than 10 s");
  return o;
}

Outcome top_k() {
  Outcome o;
  const std::vector<double> dist = {0.5, 0.3, 0.2};
  SamplerConfig cfg;
  auto counts = [&](std::uint64_t k, std::uint64_t seed) {
    cfg.k = k;
    SplitMix64 rng(seed);
    std::vector<double> c(3, 0);
    for (int i = 0; i < 10000; ++i) c[top_k_step(dist, cfg, rng).token] += 1;
    return c;
  };
  const auto c2 = counts(2, 101);
  o.require(std::abs(c2[0] / 1e4 - 0.625) <= 0.02 && std::abs(c2[1] / 1e4 - 0.375) <= 0.02 && c2[2] == 0,
            "k=2 frequencies " + fmt(c2[0] / 1e4) + "/" + fmt(c2[1] / 1e4));
  const auto c3 = counts(3, 202);
  double stat = 0;
  for (int i = 0; i < 3; ++i) stat += std::pow(c3[i] - 1e4 * dist[i], 2) / (1e4 * dist[i]);
  const double p = std::exp(-stat / 2.0);  // chi-square tail, 2 degrees of freedom
  o.require(p > 0.001, "k=|V| chi-square p " + fmt(p, 6));
  const auto c1 = counts(1, 303);
  o.require(c1[0] == 1e4, "k=1 is not argmax");
  o.detail = "k=2 " + fmt(c2[0] / 1e4) + "/" + fmt(c2[1] / 1e4) + ", chi-square p " + fmt(p, 4);
  return o;
}

Outcome oracle_equivalence() {
  Outcome o;
  std::mt19937_64 gen(2024);
  std::vector<EvalRecord> recs;
  for (int i = 0; i < 20; ++i) recs.push_back(fixtures::random_record(gen, "o" + std::to_string(i), 4));

  // resources over the fixture vocabulary; "zzq" stays unknown everywhere
  std::normal_distribution<double> g(0, 1);
  const std::size_t dim = 6;
  std::unordered_map<std::string, Vec> rows;
  oracle::Embeddings oemb;
  std::unordered_map<std::string, double> probs;
  oracle::Unigrams ou;
  ou.total = 1000;
  const Tokens known = {"the", "cat", "dog", "sat", "ran", "ada", "on", "mat", "idea", "hope"};
  for (std::size_t i = 0; i < known.size(); ++i) {
    Vec v(dim);
    for (auto& x : v) x = g(gen);
    rows[known[i]] = v;
    oemb.rows.emplace_back(known[i], v);
    probs[known[i]] = 0.01 * static_cast<double>(i + 1);
    ou.probs.emplace_back(known[i], 0.01 * static_cast<double>(i + 1));
  }
  const EmbeddingTable emb(dim, rows);
  const UnigramTable uni(probs, 1000);
  const std::vector<std::pair<std::string, double>> olex = {
      {"cat", 4.9}, {"dog", 4.8}, {"mat", 4.7}, {"idea", 1.61}, {"hope", 1.25}, {"sat", 3.3}, {"ran", 4.0}};
  const ConcretenessLexicon lex({olex.begin(), olex.end()});
  const std::vector<std::string> ostops = {"the", "on"};
  const StopwordList stops({"the", "on"});

  auto close = [&](std::optional<double> a, std::optional<double> b, const std::string& what) {
    const bool ok = a.has_value() == b.has_value() && (!a || std::abs(*a - *b) <= 1e-9);
    o.require(ok, what);
  };

  std::vector<oracle::SifItem> items;
  std::vector<std::pair<std::vector<double>, std::vector<std::size_t>>> otraces;
  std::vector<TokenTrace> traces;
  std::vector<std::size_t> words;
  std::vector<std::vector<double>> subs;
  std::size_t total_words = 0;
  std::size_t horizon = 1000;
  for (const auto& r : recs) {
    const auto& id = r.id;
    for (std::size_t n = 1; n <= 3; ++n) {
      close(distinct_n(r.tokens, n), oracle::distinct(r.tokens, n), id + " distinct-" + std::to_string(n));
      close(ngram_overlap(r.tokens, *r.prompt_tokens, n), oracle::overlap(r.tokens, *r.prompt_tokens, n),
            id + " overlap-" + std::to_string(n));
    }
    close(mean_log_unigram_prob(r.tokens, uni), oracle::mean_log_unigram(r.tokens, ou), id + " unigram");
    close(stopword_fraction(r.tokens, stops), oracle::stopword_frac(r.tokens, ostops), id + " stopwords");
    close(mean_sentence_length(r), oracle::mean_sent_len(r.sent_bounds), id + " sentence length");

    Tokens tags, lemmas;
    for (const auto& a : *r.annotations) {
      tags.emplace_back(to_string(a.pos));
      lemmas.push_back(a.lemma);
    }
    const auto dist = pos_distribution(r);
    const auto odist = oracle::pos_dist(tags);
    for (const auto& [tag, v] : odist) {
      bool found = false;
      for (const auto& [t, x] : *dist) {
        if (to_string(t) == tag) {
          found = true;
          close(x, v, id + " pos " + tag);
        }
      }
      o.require(found, id + " pos " + tag + " missing");
    }
    for (std::size_t n = 1; n <= 3; ++n) {
      close(pos_distinct_n(r, n), oracle::distinct(tags, n), id + " pos distinct-" + std::to_string(n));
    }
    close(mean_concreteness(r, lex, PosClass::kNoun), oracle::concreteness(lemmas, tags, {"NOUN"}, olex),
          id + " noun concreteness");
    close(mean_concreteness(r, lex, PosClass::kVerb), oracle::concreteness(lemmas, tags, {"VERB"}, olex),
          id + " verb concreteness");
    close(mean_concreteness(r, lex, PosClass::kNoun, {true, false}),
          oracle::concreteness(lemmas, tags, {"NOUN", "PROPN"}, olex), id + " noun+propn concreteness");

    oracle::SifItem item;
    for (const auto& [b, e] : split_sentences(*r.prompt_tokens)) {
      item.prompt.emplace_back(r.prompt_tokens->begin() + b, r.prompt_tokens->begin() + e);
    }
    for (const auto& [b, e] : r.sent_bounds) item.story.emplace_back(r.tokens.begin() + b, r.tokens.begin() + e);
    items.push_back(item);

    traces.push_back(*r.trace);
    words.push_back(r.tokens.size());
    subs.push_back(r.trace->sub_logp);
    otraces.emplace_back(r.trace->sub_logp, r.trace->word_ix);
    total_words += r.tokens.size();
    horizon = std::min(horizon, r.tokens.size());
  }

  for (bool removal : {true, false}) {
    SifConfig cfg;
    cfg.pc_removal = removal;
    const auto got = story_prompt_similarity(recs, emb, uni, cfg);
    const auto want = oracle::sif_similarity(items, oemb, ou, cfg.a, dim, removal);
    for (std::size_t i = 0; i < recs.size(); ++i) {
      close(got[i], want[i], recs[i].id + (removal ? " sif" : " sif without pc removal"));
    }
  }

  const double ppl = word_perplexity(traces, words);
  close(ppl, oracle::perplexity(subs, total_words), "perplexity");
  const auto curve = confidence_curve(traces, horizon);
  const auto want_curve = oracle::confidence(otraces, horizon);
  for (std::size_t w = 0; w < horizon; ++w) close(curve.mean_prob[w], want_curve[w], "confidence");
  o.detail = "20 records, confidence horizon " + std::to_string(horizon);
  return o;
}

Outcome end_to_end() {
  Outcome o;
  const auto t0 = Clock::now();
  const fixtures::ScratchDir dir("acceptance");
  const auto data = fixtures::data_dir();
  std::ostringstream out, err;
  auto call = [&](const std::vector<std::string>& args) {
    const int code = run(args, out, err);
    o.require(code == 0, args[0] + " exited " + std::to_string(code) + ": " + err.str());
    return code == 0;
  };

  std::ifstream in((data / "prompts.txt").string());
  std::string prompts, line;
  for (int i = 0; i < 200 && std::getline(in, line); ++i) prompts += line + "\n";
  fixtures::write_file(dir.file("prompts.txt"), prompts);

  const auto model = dir.file("trigram.bin");
  const auto stories = dir.file("stories.jsonl");
  const auto eval = dir.file("eval");
  if (!call({"train-ngram", "--input", (data / "corpus" / "train.txt").string(), "--out", model, "--order", "3"}) ||
      !call({"gen", "--model", model, "--prompts", dir.file("prompts.txt"), "--k", "1,2,20,full", "--out", stories,
             "--seed", "20180924"}) ||
      !call({"eval", "--input", stories, "--resources", (data / "resources").string(), "--out", eval})) {
    return o;
  }
  const auto report = load_csv((fs::path(eval) / "report.csv").string());
  std::vector<double> d1, lp;
  for (const auto& row : report.rows) {
    if (!row.k) continue;
    o.require(row.n == 200 || row.metric == "entity_usage_rate" || row.metric == "sent_similarity",
              row.metric + " has n=" + std::to_string(row.n));
    if (row.metric == "distinct_1") d1.push_back(row.mean);
    if (row.metric == "story_logprob") lp.push_back(row.mean);
  }
  o.require(d1.size() == 4 && lp.size() == 4, "expected four k values");
  if (d1.size() == 4 && lp.size() == 4) {
    for (std::size_t i = 1; i < 4; ++i) {
      o.require(d1[i] > d1[i - 1], "distinct-1 not strictly increasing");
      o.require(lp[i] < lp[i - 1], "story log probability not strictly decreasing");
    }
    o.detail = "distinct-1 " + fmt(d1[0]) + " " + fmt(d1[1]) + " " + fmt(d1[2]) + " " + fmt(d1[3]) +
               "; logprob " + fmt(lp[0], 1) + " " + fmt(lp[1], 1) + " " + fmt(lp[2], 1) + " " + fmt(lp[3], 1);
  }
  const double secs = seconds_since(t0);
  o.detail += "; " + fmt(secs, 1) + " s";
  o.require(secs < 300.0, "slower than 5 min");
  return o;
}

Outcome sif_identity() {
  Outcome o;
  std::mt19937_64 gen(77);
  std::normal_distribution<double> g(0, 1);
  const std::size_t dim = 30;
  std::unordered_map<std::string, Vec> rows;
  std::unordered_map<std::string, double> probs;
  for (int w = 0; w < 300; ++w) {
    Vec v(dim);
    for (auto& x : v) x = g(gen) + 0.8;  // shared offset gives a dominant component
    rows["v" + std::to_string(w)] = v;
    probs["v" + std::to_string(w)] = 1.0 / 600 + (w % 5) * 1e-4;
  }
  const EmbeddingTable emb(dim, rows);
  const UnigramTable uni(probs, 6000);
  auto sentence = [&] {
    Tokens s;
    for (int i = 0; i < 10; ++i) s.push_back("v" + std::to_string(gen() % 300));
    return s;
  };

  std::vector<EvalRecord> batch;
  std::vector<Vec> vectors;
  for (int r = 0; r < 50; ++r) {
    const Tokens p = sentence();
    const Tokens s = r == 0 ? p : sentence();
    EvalRecord rec;
    rec.id = "id" + std::to_string(r);
    rec.model = "m";
    rec.prompt_tokens = p;
    rec.prompt_text = join(p);
    rec.tokens = s;
    rec.sent_bounds = {{0, s.size()}};
    batch.push_back(rec);
    vectors.push_back(*sif_embed(p, emb, uni, 1e-3));
    vectors.push_back(*sif_embed(s, emb, uni, 1e-3));
  }
  const auto sims = story_prompt_similarity(batch, emb, uni, SifConfig{});
  o.require(sims[0].has_value() && std::abs(*sims[0] - 1.0) <= 1e-6, "twin cosine not 1");

  const auto pc = remove_first_pc(vectors);
  double worst = 0;
  for (const auto& r : pc.residuals) {
    double d = 0;
    for (std::size_t i = 0; i < dim; ++i) d += r[i] * pc.component[i];
    worst = std::max(worst, std::abs(d));
  }
  o.require(worst <= 1e-8, "residual not orthogonal: " + std::to_string(worst));
  o.detail = "twin cosine " + fmt(sims[0].value_or(NAN), 9) + ", max |<r,u>| " + std::to_string(worst);
  return o;
}

Outcome perplexity() {
  Outcome o;
  TokenTrace flat;
  for (std::size_t w = 0; w < 100; ++w) {
    flat.sub_logp.push_back(-std::log(100.0));
    flat.word_ix.push_back(w);
  }
  const std::vector<TokenTrace> one = {flat};
  const std::vector<std::size_t> n = {100};
  const double ppl = word_perplexity(one, n);
  o.require(std::abs(ppl - 100.0) <= 1e-9, "flat perplexity " + fmt(ppl, 12));

  // word 0 = pieces -1 and -2, word 1 = -0.5, word 2 = pieces -0.25 x 4
  TokenTrace split;
  split.sub_logp = {-1.0, -2.0, -0.5, -0.25, -0.25, -0.25, -0.25};
  split.word_ix = {0, 0, 1, 2, 2, 2, 2};
  const auto probs = word_probabilities(split, 3);
  o.require(probs.has_value(), "grouping failed");
  if (probs) {
    o.require(std::abs(-std::log((*probs)[0]) - 3.0) <= 1e-12, "word 0 NLL");
    o.require(std::abs(-std::log((*probs)[1]) - 0.5) <= 1e-12, "word 1 NLL");
    o.require(std::abs(-std::log((*probs)[2]) - 1.0) <= 1e-12, "word 2 NLL");
  }
  const std::vector<TokenTrace> st = {split};
  const std::vector<std::size_t> sn = {3};
  o.require(std::abs(word_perplexity(st, sn) - std::exp(4.5 / 3.0)) <= 1e-12, "grouped perplexity");
  o.detail = "flat " + fmt(ppl, 9);
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"swap probe random scorer", swap_random},
      {"prompt ranking random scorer", ranking_random},
      {"top-k sampler", top_k},
      {"oracle equivalence", oracle_equivalence},
      {"end-to-end pipeline", end_to_end},
      {"SIF identity", sif_identity},
      {"perplexity conversion", perplexity},
  };
  int failures = 0;
  for (const auto& [name, fn] : criteria) {
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    std::cout << (o.pass ? "PASS" : "FAIL") << "  " << name << "  (" << o.detail << ")\n";
    failures += o.pass ? 0 : 1;
  }
  return failures == 0 ? 0 : 1;
}
